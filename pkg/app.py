from functions.logsetup import setup_logging
from endpoints.index import cli

if __name__ == "__main__":
    setup_logging()
    cli()

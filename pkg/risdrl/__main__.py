"""Allow running as `python -m risdrl`."""
from risdrl.cli import cli

if __name__ == "__main__":
    cli()

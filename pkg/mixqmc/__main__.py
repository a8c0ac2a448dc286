"""Entry point for ``python -m mixqmc``."""
import sys

from mixqmc.cli.router import main

if __name__ == "__main__":
    sys.exit(main())

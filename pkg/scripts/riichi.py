"""Command-line entry point for the riichi_ai pipeline."""

import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from riichi_ai.cli import cli_dispatch


def main():
    """Main entry point."""
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()

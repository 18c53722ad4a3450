"""
Application entry point.
"""
import sys

from qei_lab.cli import main

if __name__ == "__main__":
    # Exit code follows the error family: 2 config, 3 numerical, 4 I/O
    sys.exit(main())

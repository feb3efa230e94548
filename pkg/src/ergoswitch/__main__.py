"""Entry point for python -m ergoswitch."""

from ergoswitch.cli import main

if __name__ == "__main__":
    raise SystemExit(main())

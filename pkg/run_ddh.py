"""
Run the ddh command line from a source checkout.
Usage: python run_ddh.py lift --algebra "local(d=2)" --system "x1*d1 x1 - t1 - e" --point t1
"""

import sys


def main():
    try:
        from ddh.cli import main as cli_main
    except ImportError as e:
        print(f"[ERROR] Missing dependencies: {e}", file=sys.stderr)
        print("pip install -r requirements.txt", file=sys.stderr)
        sys.exit(2)
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

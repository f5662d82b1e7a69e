"""accretive-wave command line tool (enable python -m accretive_wave)."""
from __future__ import annotations

import sys

import accretive_wave.cli

if __name__ == "__main__":
    sys.exit(accretive_wave.cli.main())

"""Regenerate data/su2q.json from the built-in su2q calculus.

    python scripts/write_su2q_json.py [OUT]
"""

import sys
from pathlib import Path

from ncdiffop import calcfile
from ncdiffop.library import su2q_3d

if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "data" / "su2q.json"
    calcfile.save(su2q_3d(), out)
    print(f"wrote {out}")

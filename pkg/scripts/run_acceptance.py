"""Print one pass/fail line per acceptance criterion.

    python3 scripts/run_acceptance.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from tests.test_acceptance import CRITERIA, _report, _timed  # noqa: E402


def main() -> int:
    failed = 0
    for number, title, fn, limit in CRITERIA:
        ok, detail, elapsed = _timed(fn)
        _report(None, number, title, ok, elapsed, limit, detail)
        failed += not (ok and elapsed < limit)
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())

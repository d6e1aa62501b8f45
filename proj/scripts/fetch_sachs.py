#!/usr/bin/env python3
"""Fetch the Sachs et al. (2005) observational flow-cytometry dataset.

Downloads the continuous 853-sample measurement table, reorders the columns
to the layout used by data/sachs_truth.csv, and writes a headerless numeric
CSV that `golem_bench run-real` can ingest:

    raf mek plcg pip2 pip3 erk akt pka pkc p38 jnk   (columns 0..10)

The source file is the standard one distributed with the bnlearn book; its
header names the measured proteins (praf, pmek, ..., pjnk). The script
validates the 853 x 11 shape and prints the sha256 of the produced CSV so a
fetched copy can be pinned; pass --expect-sha256 to enforce a known hash.
"""

import argparse
import gzip
import hashlib
import io
import sys
import urllib.request
from pathlib import Path

DEFAULT_URL = "https://www.bnlearn.com/book-crc/code/sachs.data.txt.gz"

# Source-header name -> our column position.
COLUMNS = {
    "praf": 0,      # raf
    "pmek": 1,      # mek
    "plcg": 2,      # plcg
    "PIP2": 3,      # pip2
    "PIP3": 4,      # pip3
    "p44/42": 5,    # erk
    "pakts473": 6,  # akt
    "PKA": 7,       # pka
    "PKC": 8,       # pkc
    "P38": 9,       # p38
    "pjnk": 10,     # jnk
}

EXPECTED_ROWS = 853


def fetch(url: str) -> bytes:
    req = urllib.request.Request(url, headers={"User-Agent": "fetch_sachs/1.0"})
    with urllib.request.urlopen(req, timeout=60) as resp:
        return resp.read()


def convert(raw: bytes) -> str:
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    lines = [ln for ln in io.StringIO(raw.decode("utf-8")) if ln.strip()]
    header = lines[0].split()
    if sorted(header) != sorted(COLUMNS):
        raise SystemExit(f"unexpected header {header}; wanted the fields {sorted(COLUMNS)}")
    order = [header.index(name) for name, _ in sorted(COLUMNS.items(), key=lambda kv: kv[1])]

    out_rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) != len(COLUMNS):
            raise SystemExit(f"line {lineno}: expected {len(COLUMNS)} fields, got {len(fields)}")
        values = [float(fields[i]) for i in order]  # parse check; keeps csv numeric
        out_rows.append(",".join(repr(v) for v in values))
    if len(out_rows) != EXPECTED_ROWS:
        raise SystemExit(f"expected {EXPECTED_ROWS} samples, got {len(out_rows)}")
    return "\n".join(out_rows) + "\n"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--url", default=DEFAULT_URL)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "sachs.csv"))
    ap.add_argument("--expect-sha256", default=None, help="fail unless the output hashes to this")
    args = ap.parse_args()

    print(f"fetching {args.url}")
    text = convert(fetch(args.url))
    digest = hashlib.sha256(text.encode()).hexdigest()
    if args.expect_sha256 and digest != args.expect_sha256:
        raise SystemExit(f"sha256 mismatch: got {digest}, expected {args.expect_sha256}")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    print(f"wrote {out} ({EXPECTED_ROWS} x {len(COLUMNS)}), sha256 {digest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

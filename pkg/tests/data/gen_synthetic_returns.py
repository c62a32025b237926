"""Regenerate synthetic_returns.csv, a complete fake returns file.

The file covers all 51 states for the 12 elections 1976..2020 with a
deterministic win pattern cycling by state index:

    i % 5 == 0  Republican wins all 12            -> Red
    i % 5 == 1  Democrat wins all 12              -> Blue
    i % 5 == 2  Republican wins exactly 9 (75%)   -> Red (boundary)
    i % 5 == 3  Democrat wins exactly 9 (75%)     -> Blue (boundary)
    i % 5 == 4  six wins each                     -> Swing

Every state-year also carries LIBERTARIAN and OTHER rows so the two-party
share never reaches 100%; year 2000 splits the Republican vote over two
fusion rows for every third state; year 1988 adds a blank-party write-in
row.  Run from the repository root:  python tests/data/gen_synthetic_returns.py
"""

from pathlib import Path

STATE_NAMES = (
    "ALABAMA", "ALASKA", "ARIZONA", "ARKANSAS", "CALIFORNIA", "COLORADO",
    "CONNECTICUT", "DELAWARE", "DISTRICT OF COLUMBIA", "FLORIDA", "GEORGIA",
    "HAWAII", "IDAHO", "ILLINOIS", "INDIANA", "IOWA", "KANSAS", "KENTUCKY",
    "LOUISIANA", "MAINE", "MARYLAND", "MASSACHUSETTS", "MICHIGAN", "MINNESOTA",
    "MISSISSIPPI", "MISSOURI", "MONTANA", "NEBRASKA", "NEVADA", "NEW HAMPSHIRE",
    "NEW JERSEY", "NEW MEXICO", "NEW YORK", "NORTH CAROLINA", "NORTH DAKOTA",
    "OHIO", "OKLAHOMA", "OREGON", "PENNSYLVANIA", "RHODE ISLAND",
    "SOUTH CAROLINA", "SOUTH DAKOTA", "TENNESSEE", "TEXAS", "UTAH", "VERMONT",
    "VIRGINIA", "WASHINGTON", "WEST VIRGINIA", "WISCONSIN", "WYOMING",
)
YEARS = tuple(range(1976, 2024, 4))


def republican_wins(i: int, j: int) -> bool:
    kind = i % 5
    if kind == 0:
        return True
    if kind == 1:
        return False
    if kind == 2:
        return j < 9
    if kind == 3:
        return j >= 9
    return j % 2 == 0


def build_rows() -> list[dict]:
    rows = []
    for i, state in enumerate(STATE_NAMES):
        for j, year in enumerate(YEARS):
            total = 800_000 + i * 1_000 + j * 100
            if republican_wins(i, j):
                rep_pct = 52 + (i * 7 + j * 3) % 5
                dem_pct = 100 - rep_pct - 5
            else:
                dem_pct = 52 + (i * 3 + j * 2) % 5
                rep_pct = 100 - dem_pct - 5
            rep = round(total * rep_pct / 100)
            dem = round(total * dem_pct / 100)
            lib = round(total * 3 / 100)
            other = total - rep - dem - lib

            def row(candidate, detailed, simplified, votes):
                rows.append({
                    "year": year, "state": state, "office": "US PRESIDENT",
                    "candidate": candidate, "party_detailed": detailed,
                    "candidatevotes": votes, "totalvotes": total,
                    "party_simplified": simplified,
                })

            if year == 2000 and i % 3 == 0:
                row("R CANDIDATE", "REPUBLICAN", "REPUBLICAN", rep - rep // 3)
                row("R CANDIDATE", "CONSERVATIVE", "REPUBLICAN", rep // 3)
            else:
                row("R CANDIDATE", "REPUBLICAN", "REPUBLICAN", rep)
            row("D CANDIDATE", "DEMOCRAT", "DEMOCRAT", dem)
            row("L CANDIDATE", "LIBERTARIAN", "LIBERTARIAN", lib)
            if year == 1988:
                carve = other // 4
                row("WRITEIN", "", "", carve)
                row("MISC", "OTHER", "OTHER", other - carve)
            else:
                row("MISC", "OTHER", "OTHER", other)
    return rows


def main() -> None:
    rows = build_rows()
    header = ["year", "state", "office", "candidate", "party_detailed",
              "candidatevotes", "totalvotes", "party_simplified"]
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(str(r[h]) for h in header))
    out = Path(__file__).parent / "synthetic_returns.csv"
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(rows)} rows)")


if __name__ == "__main__":
    main()

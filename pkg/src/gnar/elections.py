"""US presidential returns: ingestion, state classification and preprocessing.

The loader consumes the MIT Election Data and Science Lab per-candidate
CSV (columns ``year``, ``state``, ``party_simplified`` or ``party``,
``candidatevotes``, ``totalvotes``) and produces the 51 x 12 panel of
Republican vote percentages for the quadrennial elections 1976..2020,
states ordered alphabetically.  The Republican share divides by total
votes cast (all parties and write-ins), and fusion tickets are summed
through the simplified party label.

States are classified Red/Blue/Swing by the share of elections won: a
party winning at least 75% of the twelve contests (i.e. nine or more)
claims the state, otherwise it is a Swing state.  A "win" is a plurality
of that state's popular vote between the two major parties; ties (never
observed) would count for neither.

The border network connects states sharing a land border.  The embedded
contiguity list includes DC-Maryland and DC-Virginia, leaves Alaska and
Hawaii isolated, and treats the four-corners point contacts (AZ-CO and
NM-UT) as not adjacent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, GnarError
from .network import Network, build_network
from .panel import TimeSeriesPanel
from .partition import CommunityPartition

ELECTION_YEARS = tuple(range(1976, 2024, 4))

#: 50 states plus the District of Columbia, alphabetical by name.
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

_POSTAL = (
    "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "DC", "FL", "GA", "HI",
    "ID", "IL", "IN", "IA", "KS", "KY", "LA", "ME", "MD", "MA", "MI", "MN",
    "MS", "MO", "MT", "NE", "NV", "NH", "NJ", "NM", "NY", "NC", "ND", "OH",
    "OK", "OR", "PA", "RI", "SC", "SD", "TN", "TX", "UT", "VT", "VA", "WA",
    "WV", "WI", "WY",
)

#: Land-border contiguity, symmetric; AK and HI are absent (isolated).
_BORDERS = {
    "AL": ("FL", "GA", "MS", "TN"),
    "AZ": ("CA", "NV", "NM", "UT"),
    "AR": ("LA", "MS", "MO", "OK", "TN", "TX"),
    "CA": ("AZ", "NV", "OR"),
    "CO": ("KS", "NE", "NM", "OK", "UT", "WY"),
    "CT": ("MA", "NY", "RI"),
    "DE": ("MD", "NJ", "PA"),
    "DC": ("MD", "VA"),
    "FL": ("AL", "GA"),
    "GA": ("AL", "FL", "NC", "SC", "TN"),
    "ID": ("MT", "NV", "OR", "UT", "WA", "WY"),
    "IL": ("IN", "IA", "KY", "MO", "WI"),
    "IN": ("IL", "KY", "MI", "OH"),
    "IA": ("IL", "MN", "MO", "NE", "SD", "WI"),
    "KS": ("CO", "MO", "NE", "OK"),
    "KY": ("IL", "IN", "MO", "OH", "TN", "VA", "WV"),
    "LA": ("AR", "MS", "TX"),
    "ME": ("NH",),
    "MD": ("DE", "DC", "PA", "VA", "WV"),
    "MA": ("CT", "NH", "NY", "RI", "VT"),
    "MI": ("IN", "OH", "WI"),
    "MN": ("IA", "ND", "SD", "WI"),
    "MS": ("AL", "AR", "LA", "TN"),
    "MO": ("AR", "IL", "IA", "KS", "KY", "NE", "OK", "TN"),
    "MT": ("ID", "ND", "SD", "WY"),
    "NE": ("CO", "IA", "KS", "MO", "SD", "WY"),
    "NV": ("AZ", "CA", "ID", "OR", "UT"),
    "NH": ("ME", "MA", "VT"),
    "NJ": ("DE", "NY", "PA"),
    "NM": ("AZ", "CO", "OK", "TX"),
    "NY": ("CT", "MA", "NJ", "PA", "VT"),
    "NC": ("GA", "SC", "TN", "VA"),
    "ND": ("MN", "MT", "SD"),
    "OH": ("IN", "KY", "MI", "PA", "WV"),
    "OK": ("AR", "CO", "KS", "MO", "NM", "TX"),
    "OR": ("CA", "ID", "NV", "WA"),
    "PA": ("DE", "MD", "NJ", "NY", "OH", "WV"),
    "RI": ("CT", "MA"),
    "SC": ("GA", "NC"),
    "SD": ("IA", "MN", "MT", "NE", "ND", "WY"),
    "TN": ("AL", "AR", "GA", "KY", "MS", "MO", "NC", "VA"),
    "TX": ("AR", "LA", "NM", "OK"),
    "UT": ("AZ", "CO", "ID", "NV", "WY"),
    "VT": ("MA", "NH", "NY"),
    "VA": ("DC", "KY", "MD", "NC", "TN", "WV"),
    "WA": ("ID", "OR"),
    "WV": ("KY", "MD", "OH", "PA", "VA"),
    "WI": ("IL", "IA", "MI", "MN"),
    "WY": ("CO", "ID", "MT", "NE", "SD", "UT"),
}

COMMUNITY_LABELS = ("Red", "Blue", "Swing")


def us_border_network() -> Network:
    """The 51-node land-border network, nodes in alphabetical state order."""
    index = {code: i + 1 for i, code in enumerate(_POSTAL)}
    edges = set()
    for a, nbrs in _BORDERS.items():
        for b in nbrs:
            if a not in _BORDERS.get(b, ()):
                raise GnarError(f"border table asymmetric at {a}-{b}")
            edges.add((min(index[a], index[b]), max(index[a], index[b])))
    return build_network(len(_POSTAL), sorted(edges))


@dataclass(frozen=True)
class ElectionPanel:
    """Republican vote-share panel plus the vote counts behind it."""

    panel: TimeSeriesPanel
    rep_votes: np.ndarray
    dem_votes: np.ndarray
    total_votes: np.ndarray


@dataclass(frozen=True)
class StateClassification:
    """Win counts per state and the Red/Blue/Swing partition they induce."""

    states: tuple[str, ...]
    rep_wins: np.ndarray
    dem_wins: np.ndarray
    partition: CommunityPartition

    def to_csv_text(self) -> str:
        lines = ["state,wins_R,wins_D,community"]
        for i, state in enumerate(self.states):
            label = self.partition.label_of(self.partition.community_of(i + 1))
            lines.append(f"{state},{self.rep_wins[i]},{self.dem_wins[i]},{label}")
        return "\n".join(lines) + "\n"


def _party_field(row: dict) -> str:
    for key in ("party_simplified", "party", "party_detailed"):
        if key in row and row[key] is not None:
            return row[key].strip().upper()
    raise DataError("returns file has no party column "
                    "(expected party_simplified, party or party_detailed)")


def _votes(raw) -> int:
    """Vote counts; blank and NA cells count as zero."""
    text = (raw or "").strip()
    if not text or text.upper() == "NA":
        return 0
    return int(float(text))


def load_returns(path: str | Path) -> ElectionPanel:
    """Build the 51 x 12 Republican-share panel from a per-candidate CSV."""
    path = Path(path)
    state_idx = {name: i for i, name in enumerate(STATE_NAMES)}
    year_idx = {y: j for j, y in enumerate(ELECTION_YEARS)}
    d, T = len(STATE_NAMES), len(ELECTION_YEARS)
    rep = np.zeros((d, T))
    dem = np.zeros((d, T))
    total = np.full((d, T), np.nan)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        for row in reader:
            office = (row.get("office") or "").strip().upper()
            if office and office != "US PRESIDENT":
                continue
            year = int(row["year"])
            if year not in year_idx:
                continue
            state = row["state"].strip().upper()
            if state not in state_idx:
                raise DataError(f"{path}: unknown state name {state!r}")
            i, j = state_idx[state], year_idx[year]
            votes = _votes(row["candidatevotes"])
            tv = _votes(row["totalvotes"])
            if np.isnan(total[i, j]):
                total[i, j] = tv
            else:
                total[i, j] = max(total[i, j], tv)
            party = _party_field(row)
            if party == "REPUBLICAN":
                rep[i, j] += votes
            elif party == "DEMOCRAT":
                dem[i, j] += votes
    missing = np.argwhere(np.isnan(total))
    if missing.size:
        i, j = missing[0]
        raise DataError(f"{path}: no rows for {STATE_NAMES[i]} in "
                        f"{ELECTION_YEARS[j]}")
    if np.any(total <= 0):
        i, j = np.argwhere(total <= 0)[0]
        raise DataError(f"{path}: nonpositive total votes for {STATE_NAMES[i]} "
                        f"in {ELECTION_YEARS[j]}")
    share = 100.0 * rep / total
    if np.any(share < 0) or np.any(share > 100):
        raise DataError(f"{path}: Republican share outside [0, 100]")
    panel = TimeSeriesPanel(values=share, node_labels=STATE_NAMES,
                            time_labels=tuple(str(y) for y in ELECTION_YEARS),
                            meta={"source": path.name, "series": "republican_share"})
    return ElectionPanel(panel=panel, rep_votes=rep, dem_votes=dem, total_votes=total)


def classify(data: ElectionPanel) -> StateClassification:
    """Red/Blue/Swing classification from major-party plurality win counts."""
    rep_wins = np.sum(data.rep_votes > data.dem_votes, axis=1).astype(int)
    dem_wins = np.sum(data.dem_votes > data.rep_votes, axis=1).astype(int)
    T = data.panel.T
    threshold = int(np.ceil(0.75 * T))
    assignment = []
    for i in range(len(STATE_NAMES)):
        if rep_wins[i] >= threshold:
            assignment.append(1)
        elif dem_wins[i] >= threshold:
            assignment.append(2)
        else:
            assignment.append(3)
    present = sorted(set(assignment))
    if present != [1, 2, 3]:
        missing = [COMMUNITY_LABELS[c - 1] for c in (1, 2, 3) if c not in present]
        raise DataError(f"classification produced empty communities: {missing}")
    partition = CommunityPartition(assignment=tuple(assignment), n_communities=3,
                                   labels=COMMUNITY_LABELS)
    return StateClassification(states=STATE_NAMES, rep_wins=rep_wins,
                               dem_wins=dem_wins, partition=partition)


def standardize(panel: TimeSeriesPanel) -> TimeSeriesPanel:
    """Per node: subtract the mean and scale to unit sum of squares."""
    centred = panel.values - panel.values.mean(axis=1, keepdims=True)
    ss = np.sum(centred ** 2, axis=1)
    flat = np.argwhere(ss <= 0)
    if flat.size:
        raise GnarError(f"node {panel.node_labels[flat[0, 0]]} is constant; "
                        "cannot standardise")
    out = panel.with_values(centred / np.sqrt(ss)[:, None])
    out.meta["transform"] = "standardised"
    return out


def difference(panel: TimeSeriesPanel) -> TimeSeriesPanel:
    """One-lag differences; drops the first time step."""
    if panel.T < 2:
        raise GnarError("differencing needs at least two time steps")
    out = TimeSeriesPanel(values=panel.values[:, 1:] - panel.values[:, :-1],
                          node_labels=panel.node_labels,
                          time_labels=panel.time_labels[1:],
                          meta=dict(panel.meta))
    out.meta["transform"] = "one-lag differenced"
    return out

import csv

import numpy as np
import pytest

from gnar.elections import (COMMUNITY_LABELS, ELECTION_YEARS, STATE_NAMES,
                            ElectionPanel, classify, difference, load_returns,
                            standardize, us_border_network)
from gnar.errors import DataError, GnarError
from gnar.estimate import build_design, fit_ols
from gnar.forecast import ModelSpec, compare
from gnar.model import parse_order
from gnar.network import UNREACHABLE, bfs_distances, default_weights
from gnar.panel import TimeSeriesPanel

from conftest import real_returns_path

STATE_INDEX = {name: i for i, name in enumerate(STATE_NAMES)}


def recount_from_csv(path):
    """Independent tally of the returns file with the csv module."""
    d, T = len(STATE_NAMES), len(ELECTION_YEARS)
    year_idx = {y: j for j, y in enumerate(ELECTION_YEARS)}
    rep = np.zeros((d, T))
    dem = np.zeros((d, T))
    total = np.zeros((d, T))
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            i = STATE_INDEX[row["state"].strip().upper()]
            j = year_idx[int(row["year"])]
            party = (row.get("party_simplified") or "").strip().upper()
            votes = int(float(row["candidatevotes"]))
            total[i, j] = max(total[i, j], int(float(row["totalvotes"])))
            if party == "REPUBLICAN":
                rep[i, j] += votes
            elif party == "DEMOCRAT":
                dem[i, j] += votes
    return rep, dem, total


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

def test_synthetic_panel_shape_and_order(synthetic_returns_path):
    data = load_returns(synthetic_returns_path)
    assert data.panel.values.shape == (51, 12)
    assert data.panel.node_labels == STATE_NAMES
    assert list(data.panel.node_labels) == sorted(data.panel.node_labels)
    assert data.panel.time_labels == tuple(str(y) for y in ELECTION_YEARS)
    assert np.all(data.panel.values >= 0) and np.all(data.panel.values <= 100)


def test_loader_matches_recount_oracle(synthetic_returns_path):
    data = load_returns(synthetic_returns_path)
    rep, dem, total = recount_from_csv(synthetic_returns_path)
    assert np.array_equal(data.rep_votes, rep)
    assert np.array_equal(data.dem_votes, dem)
    assert np.array_equal(data.total_votes, total)
    assert np.allclose(data.panel.values, 100.0 * rep / total)


def test_share_arithmetic_hand_example(tmp_path):
    header = ("year,state,office,candidate,party_detailed,candidatevotes,"
              "totalvotes,party_simplified")
    rows = [header]
    for year in ELECTION_YEARS:
        for state in STATE_NAMES:
            if state == "ALABAMA" and year == 1976:
                rows.append(f"{year},{state},US PRESIDENT,R,REPUBLICAN,600,1000,REPUBLICAN")
                rows.append(f"{year},{state},US PRESIDENT,D,DEMOCRAT,380,1000,DEMOCRAT")
                rows.append(f"{year},{state},US PRESIDENT,W,,20,1000,OTHER")
            else:
                rows.append(f"{year},{state},US PRESIDENT,R,REPUBLICAN,500,1000,REPUBLICAN")
                rows.append(f"{year},{state},US PRESIDENT,D,DEMOCRAT,450,1000,DEMOCRAT")
                rows.append(f"{year},{state},US PRESIDENT,W,,50,1000,OTHER")
    path = tmp_path / "returns.csv"
    path.write_text("\n".join(rows) + "\n")
    data = load_returns(path)
    assert data.panel.values[0, 0] == 60.0


def test_loader_rejects_missing_cells(tmp_path):
    path = tmp_path / "returns.csv"
    path.write_text("year,state,candidatevotes,totalvotes,party_simplified\n"
                    "1976,ALABAMA,10,20,REPUBLICAN\n")
    with pytest.raises(DataError, match="no rows"):
        load_returns(path)


def test_loader_rejects_unknown_state(tmp_path):
    path = tmp_path / "returns.csv"
    path.write_text("year,state,candidatevotes,totalvotes,party_simplified\n"
                    "1976,NARNIA,10,20,REPUBLICAN\n")
    with pytest.raises(DataError, match="unknown state"):
        load_returns(path)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def test_classification_matches_recount_oracle(synthetic_returns_path):
    data = load_returns(synthetic_returns_path)
    cl = classify(data)
    rep, dem, _ = recount_from_csv(synthetic_returns_path)
    rep_wins = (rep > dem).sum(axis=1)
    dem_wins = (dem > rep).sum(axis=1)
    assert np.array_equal(cl.rep_wins, rep_wins)
    assert np.array_equal(cl.dem_wins, dem_wins)
    assert np.all(cl.rep_wins + cl.dem_wins == 12)
    for i in range(51):
        expected = 1 if rep_wins[i] >= 9 else (2 if dem_wins[i] >= 9 else 3)
        assert cl.partition.community_of(i + 1) == expected


def test_classification_thresholds(synthetic_returns_path):
    data = load_returns(synthetic_returns_path)
    cl = classify(data)
    # fixture construction: ALABAMA sweeps all 12 for the Republicans,
    # ARIZONA wins exactly 9 (the 75% boundary), ARKANSAS loses exactly 9
    assert cl.rep_wins[STATE_INDEX["ALABAMA"]] == 12
    assert cl.partition.label_of(cl.partition.community_of(
        STATE_INDEX["ALABAMA"] + 1)) == "Red"
    assert cl.rep_wins[STATE_INDEX["ARIZONA"]] == 9
    assert cl.partition.label_of(cl.partition.community_of(
        STATE_INDEX["ARIZONA"] + 1)) == "Red"
    assert cl.dem_wins[STATE_INDEX["ARKANSAS"]] == 9
    assert cl.partition.label_of(cl.partition.community_of(
        STATE_INDEX["ARKANSAS"] + 1)) == "Blue"
    assert cl.partition.label_of(cl.partition.community_of(
        STATE_INDEX["CALIFORNIA"] + 1)) == "Swing"
    assert cl.partition.labels == COMMUNITY_LABELS


def test_classification_monotone_in_wins(synthetic_returns_path):
    # flipping one Democrat win to a Republican win never moves a state
    # away from Red
    data = load_returns(synthetic_returns_path)
    base = classify(data)
    rank = {1: 2, 3: 1, 2: 0}  # Red > Swing > Blue
    i = STATE_INDEX["CALIFORNIA"]
    flipped_rep = data.rep_votes.copy()
    flipped_dem = data.dem_votes.copy()
    j = int(np.argmax(flipped_dem[i] > flipped_rep[i]))
    flipped_rep[i, j], flipped_dem[i, j] = flipped_dem[i, j], flipped_rep[i, j]
    flipped = ElectionPanel(panel=data.panel, rep_votes=flipped_rep,
                            dem_votes=flipped_dem, total_votes=data.total_votes)
    after = classify(flipped)
    assert rank[after.partition.community_of(i + 1)] >= \
        rank[base.partition.community_of(i + 1)]


def test_classification_csv(synthetic_returns_path):
    cl = classify(load_returns(synthetic_returns_path))
    lines = cl.to_csv_text().strip().splitlines()
    assert lines[0] == "state,wins_R,wins_D,community"
    assert len(lines) == 52
    assert lines[1].startswith("ALABAMA,12,0,Red")


# ---------------------------------------------------------------------------
# border network
# ---------------------------------------------------------------------------

def test_border_network_basics():
    net = us_border_network()
    assert net.d == 51
    assert net.n_edges == 107
    assert net.neighbours(STATE_INDEX["ALASKA"] + 1) == []
    assert net.neighbours(STATE_INDEX["HAWAII"] + 1) == []
    dc = STATE_INDEX["DISTRICT OF COLUMBIA"] + 1
    assert sorted(STATE_NAMES[i - 1] for i in net.neighbours(dc)) == \
        ["MARYLAND", "VIRGINIA"]


def test_border_network_corner_states_not_adjacent():
    net = us_border_network()
    az = STATE_INDEX["ARIZONA"] + 1
    co = STATE_INDEX["COLORADO"] + 1
    nm = STATE_INDEX["NEW MEXICO"] + 1
    ut = STATE_INDEX["UTAH"] + 1
    edges = net.edges
    assert (min(az, co), max(az, co)) not in edges
    assert (min(nm, ut), max(nm, ut)) not in edges
    assert (min(az, nm), max(az, nm)) in edges
    assert (min(co, ut), max(co, ut)) in edges


def test_border_network_degrees():
    net = us_border_network()
    assert len(net.neighbours(STATE_INDEX["MISSOURI"] + 1)) == 8
    assert len(net.neighbours(STATE_INDEX["TENNESSEE"] + 1)) == 8
    assert len(net.neighbours(STATE_INDEX["MAINE"] + 1)) == 1
    dist = bfs_distances(net)
    mainland = [i for i in range(51)
                if STATE_NAMES[i] not in ("ALASKA", "HAWAII")]
    sub = dist[np.ix_(mainland, mainland)]
    assert np.all(sub != UNREACHABLE)  # the mainland is connected


# ---------------------------------------------------------------------------
# preprocessing
# ---------------------------------------------------------------------------

def test_standardize_contract(synthetic_returns_path):
    panel = load_returns(synthetic_returns_path).panel
    std = standardize(panel)
    assert np.all(np.abs(std.values.mean(axis=1)) < 1e-12)
    assert np.all(np.abs((std.values ** 2).sum(axis=1) - 1.0) < 1e-12)


def test_standardize_scale_invariance(synthetic_returns_path):
    panel = load_returns(synthetic_returns_path).panel
    std = standardize(panel)
    doubled = panel.with_values(panel.values * 2.0)
    assert np.allclose(standardize(doubled).values, std.values, atol=1e-12)


def test_standardize_rejects_constant_node():
    panel = TimeSeriesPanel(np.ones((2, 5)), ("a", "b"), tuple(range(5)))
    with pytest.raises(GnarError, match="constant"):
        standardize(panel)


def test_difference_contract(synthetic_returns_path):
    panel = load_returns(synthetic_returns_path).panel
    diff = difference(panel)
    assert diff.T == 11
    assert diff.time_labels[0] == "1980"
    assert np.allclose(diff.values,
                       panel.values[:, 1:] - panel.values[:, :-1])
    const = TimeSeriesPanel(np.full((2, 4), 3.0), ("a", "b"), tuple(range(4)))
    assert np.all(difference(const).values == 0.0)
    single = TimeSeriesPanel(np.ones((2, 1)), ("a", "b"), ("0",))
    with pytest.raises(GnarError):
        difference(single)


def test_difference_standardize_commute_with_permutation(synthetic_returns_path):
    panel = load_returns(synthetic_returns_path).panel
    rng = np.random.default_rng(0)
    perm = rng.permutation(51)
    permuted = TimeSeriesPanel(panel.values[perm],
                               tuple(panel.node_labels[i] for i in perm),
                               panel.time_labels)
    a = standardize(difference(panel)).values[perm]
    b = standardize(difference(permuted)).values
    assert np.allclose(a, b, atol=1e-12)


def test_pipeline_deterministic(synthetic_returns_path):
    def run():
        data = load_returns(synthetic_returns_path)
        part = classify(data).partition
        net = us_border_network()
        W = default_weights(bfs_distances(net))
        std = standardize(data.panel)
        order = parse_order("community:[2,2,2];{[1,0],[1,0],[1,0]}")
        fit = fit_ols(build_design(std, order, net, W, part))
        return fit.theta

    assert np.array_equal(run(), run())


def test_synthetic_full_study_runs(synthetic_returns_path):
    data = load_returns(synthetic_returns_path)
    part = classify(data).partition
    net = us_border_network()
    W = default_weights(bfs_distances(net))
    std = standardize(data.panel)
    order = parse_order("community:[2,2,2];{[1,0],[1,0],[1,0]}")
    fit = fit_ols(build_design(std, order, net, W, part))
    assert fit.theta.shape == (9,)
    diff = standardize(difference(data.panel))
    order_d = parse_order("community:[3,3,3];{[0,0,0],[0,0,0],[0,0,0]}")
    fit_d = fit_ols(build_design(diff, order_d, net, W, part))
    assert fit_d.theta.shape == (9,)
    report = compare(data.panel, net, W,
                     [ModelSpec("GNAR", order),
                      ModelSpec("GNAR*", parse_order("global:2;[1,0]"))],
                     part)
    assert report.entry("GNAR").n_params == 9
    assert report.entry("GNAR*").n_params == 3


# ---------------------------------------------------------------------------
# dataset-gated checks against reference values for the real returns file
# ---------------------------------------------------------------------------

needs_real_data = pytest.mark.skipif(
    real_returns_path() is None,
    reason="MIT Election Lab file not present (set GNAR_ELECTIONS_CSV or put "
           "1976-2020-president.csv under data/); reference-value checks skipped")


@needs_real_data
def test_real_panel_shape_and_range():
    data = load_returns(real_returns_path())
    assert data.panel.values.shape == (51, 12)
    assert np.all(data.panel.values >= 0) and np.all(data.panel.values <= 100)


@needs_real_data
def test_real_naive_holdout_rmspe():
    data = load_returns(real_returns_path())
    net = us_border_network()
    W = default_weights(bfs_distances(net))
    report = compare(data.panel, net, W, [], classify(data).partition)
    naive = report.entry("naive")
    assert naive.rmspe == pytest.approx(2.45, abs=0.01)
    assert naive.rmspe_centred == pytest.approx(naive.rmspe, abs=1e-9)


@needs_real_data
def test_real_standardised_fit_coefficients():
    data = load_returns(real_returns_path())
    part = classify(data).partition
    net = us_border_network()
    W = default_weights(bfs_distances(net))
    std = standardize(data.panel)
    order = parse_order("community:[2,2,2];{[1,0],[1,0],[1,0]}")
    fit = fit_ols(build_design(std, order, net, W, part))
    reference = {
        "alpha.1.1": 0.393, "beta.1.1.1": 0.183, "alpha.2.1": -0.593,
        "alpha.1.2": 0.558, "beta.1.1.2": 0.069, "alpha.2.2": -0.351,
        "alpha.1.3": 0.905, "beta.1.1.3": -0.747, "alpha.2.3": -0.591,
    }
    estimates = dict(zip(fit.names, fit.theta))
    for name, value in reference.items():
        assert estimates[name] == pytest.approx(value, abs=0.02), name
    assert not fit.stationary  # the swing-state sum exceeds one


@needs_real_data
def test_real_differenced_fit_coefficients():
    data = load_returns(real_returns_path())
    part = classify(data).partition
    net = us_border_network()
    W = default_weights(bfs_distances(net))
    diff = standardize(difference(data.panel))
    order = parse_order("community:[3,3,3];{[0,0,0],[0,0,0],[0,0,0]}")
    fit = fit_ols(build_design(diff, order, net, W, part))
    reference = {
        "alpha.1.1": -0.081, "alpha.2.1": -0.538, "alpha.3.1": -0.303,
        "alpha.1.2": -0.139, "alpha.2.2": -0.571, "alpha.3.2": -0.251,
        "alpha.1.3": 0.029, "alpha.2.3": -0.582, "alpha.3.3": -0.178,
    }
    estimates = dict(zip(fit.names, fit.theta))
    for name, value in reference.items():
        assert estimates[name] == pytest.approx(value, abs=0.02), name
    assert fit.stationary


@needs_real_data
def test_real_parameter_counts_match_comparison_table():
    order = parse_order("community:[2,2,2];{[1,0],[1,0],[1,0]}")
    pooled = parse_order("global:2;[1,0]")
    assert order.param_count() == 9
    assert pooled.param_count() == 3

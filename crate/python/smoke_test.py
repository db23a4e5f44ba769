"""Smoke test for the max2sat extension module.

Build and install first:
    maturin develop -m crates/python/Cargo.toml
or
    maturin build -m crates/python/Cargo.toml && pip install target/wheels/max2sat-*.whl
"""

import itertools

import max2sat


def check_mapping():
    f = max2sat.Formula(3, [[1, 2], [-1, 3], [-2, -3], [1, -3]])
    p = max2sat.map_formula(f)
    for bits in itertools.product([False, True], repeat=f.n):
        spins = [1 if b else -1 for b in bits]
        assert p.energy(spins) == 4 * f.count_violations(list(bits)) - f.num_clauses
    print("mapping identity holds on", f)


def check_solvers():
    for formula in max2sat.random_ensemble(14, 1.5, 20, seed=3):
        bnb = max2sat.branch_and_bound(formula)
        brute = max2sat.brute_force(formula)
        assert bnb.optimal and bnb.optimum == brute.optimum
        assert formula.count_violations(bnb.assignment) == bnb.optimum
    print("branch and bound agrees with brute force on 20 instances")


def check_anneal():
    g = max2sat.ChimeraGraph.pseudo_dw1()
    assert (g.num_active, g.num_edges, g.max_degree) == (108, 255, 6)
    formulas = max2sat.chimera_ensemble(16, 1.0, 5, seed=1)
    for f in formulas:
        opt = max2sat.branch_and_bound(f).optimum
        stats = max2sat.anneal(f, optimum=opt, reads=20, sweeps=500, seed=7)
        assert 0.0 <= stats["p_success"] <= 1.0
        assert min(stats["violations"]) >= opt
    print("annealer ran on", len(formulas), "chimera instances of", g)


def check_analysis():
    assert max2sat.tts(0.5) == (7, 0.007)
    assert max2sat.tts(1.0)[0] == 1
    assert max2sat.tts(0.0) == (None, None)
    xs = [3.0, 1.0, 4.0, 1.0, 5.0]
    assert max2sat.spearman(xs, xs) == 1.0
    assert max2sat.spearman(xs, [-x for x in xs]) == -1.0
    left, right, width = max2sat.scaling_window([(0.5, 1.0), (1.0, 0.8), (1.5, 0.2)], 0.98, 0.3)
    assert left < right and abs(width - (right - left)) < 1e-12

    truth = {"A": 4.75, "B": 0.0036, "gamma": 0.75, "delta": 1.1068}
    alpha, n, y = [], [], []
    for a in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0]:
        for size in [16, 32, 48, 64, 80, 96]:
            alpha.append(a)
            n.append(float(size))
            y.append(truth["A"] * 2.718281828459045 ** (truth["B"] * a ** truth["gamma"] * size ** truth["delta"]))
    assert max2sat.data_collapse(alpha, n, y, a=truth["A"]) == 0.75
    model = max2sat.fit("tts", alpha, n, y, fixed={"gamma": 0.75})
    for name in ("A", "B", "delta"):
        assert abs(model[name] - truth[name]) / truth[name] < 1e-3, (name, model[name])
    print("analysis helpers ok, fit R² =", round(model["r_squared"], 6))


if __name__ == "__main__":
    check_mapping()
    check_solvers()
    check_anneal()
    check_analysis()
    print("smoke test passed")

"""Reference values for the statistics code, computed with scipy, statsmodels
and scikit-learn. Run from this directory; writes JSON next to it.

    python3 stats_oracles.py
"""
import json
import numpy as np
from scipy import stats
from sklearn.metrics import accuracy_score, f1_score
from statsmodels.stats.inter_rater import fleiss_kappa

rng = np.random.default_rng(20240917)


def dump(name, obj):
    with open(f"../{name}", "w") as f:
        json.dump(obj, f, indent=1, sort_keys=True)
        f.write("\n")


def ttest_cases():
    cases = []
    for i in range(50):
        na, nb = rng.integers(2, 31, size=2)
        a = rng.normal(rng.uniform(-20, 20), rng.uniform(0.5, 30), size=na).round(6)
        b = rng.normal(rng.uniform(-20, 20), rng.uniform(0.5, 30), size=nb).round(6)
        case = {"a": a.tolist(), "b": b.tolist(), "results": []}
        for variant, equal_var in (("welch", False), ("pooled", True)):
            for alt in ("greater", "less", "two-sided"):
                r = stats.ttest_ind(a, b, equal_var=equal_var, alternative=alt)
                case["results"].append({
                    "variant": variant,
                    "alternative": alt,
                    "t": float(r.statistic),
                    "df": float(r.df),
                    "p": float(r.pvalue),
                })
        cases.append(case)
    a, b = [2.0, 4.0, 6.0, 8.0], [1.0, 3.0, 5.0, 7.0]
    r = stats.ttest_ind(a, b, equal_var=True, alternative="greater")
    cases.append({"a": a, "b": b, "results": [
        {"variant": "pooled", "alternative": "greater", "t": float(r.statistic), "df": float(r.df), "p": float(r.pvalue)}
    ]})
    return cases


def kappa_cases():
    cases = []
    for i in range(20):
        items = int(rng.integers(5, 40))
        cats = int(rng.integers(2, 6))
        raters = int(rng.integers(2, 8))
        # Skewed category preferences so agreement varies between matrices.
        p = rng.dirichlet(np.ones(cats) * rng.uniform(0.3, 3))
        rows = [rng.multinomial(raters, p).tolist() for _ in range(items)]
        cases.append({"counts": rows, "kappa": float(fleiss_kappa(np.array(rows), method="fleiss"))})
    wiki = [
        [0, 0, 0, 0, 14], [0, 2, 6, 4, 2], [0, 0, 3, 5, 6], [0, 3, 9, 2, 0], [2, 2, 8, 1, 1],
        [7, 7, 0, 0, 0], [3, 2, 6, 3, 0], [2, 5, 3, 2, 2], [6, 5, 2, 1, 0], [0, 2, 2, 3, 7],
    ]
    cases.append({"counts": wiki, "kappa": float(fleiss_kappa(np.array(wiki), method="fleiss"))})
    return cases


def bandwidth(x):
    x = np.asarray(x)
    sd = np.std(x, ddof=1)
    iqr = np.percentile(x, 75) - np.percentile(x, 25)
    lo = min(sd, iqr / 1.34)
    if lo <= 0:
        lo = max(sd, iqr / 1.34)
    return 0.9 * lo * len(x) ** -0.2


def kde_cases():
    cases = []
    samples = [
        rng.normal(0, 30, size=50),
        np.concatenate([rng.normal(-40, 8, size=25), rng.normal(35, 12, size=25)]),
        rng.uniform(-100, 100, size=50),
    ]
    for values in samples:
        values = values.round(6)
        h = bandwidth(values)
        grid = np.linspace(values.min() - 4 * h, values.max() + 4 * h, 512)
        # gaussian_kde scales its factor by the sample standard deviation.
        k = stats.gaussian_kde(values, bw_method=h / np.std(values, ddof=1))
        cases.append({
            "values": values.tolist(),
            "bandwidth": float(h),
            "grid": grid.tolist(),
            "density": k.evaluate(grid).tolist(),
        })
    return cases


def eval_cases():
    cases = []
    fixed = [[[2, 1], [1, 2]], [[3, 0], [1, 0]], [[5, 0], [0, 5]], [[0, 4], [3, 0]], [[10, 2], [7, 1]]]
    for _ in range(5):
        fixed.append(rng.integers(0, 20, size=(2, 2)).tolist())
    for conf in fixed:
        gold, pred = [], []
        for g in range(2):
            for p in range(2):
                gold += [g] * conf[g][p]
                pred += [p] * conf[g][p]
        kw = {"labels": [0, 1], "zero_division": 0}
        cases.append({
            "confusion": conf,
            "accuracy": accuracy_score(gold, pred),
            "f1_macro": f1_score(gold, pred, average="macro", **kw),
            "f1_micro": f1_score(gold, pred, average="micro", **kw),
            "f1_weighted": f1_score(gold, pred, average="weighted", **kw),
            "f1_agentic": f1_score(gold, pred, average=None, **kw)[0],
            "f1_communal": f1_score(gold, pred, average=None, **kw)[1],
        })
    return cases


dump("ttest_oracle.json", ttest_cases())
dump("kappa_oracle.json", kappa_cases())
dump("kde_oracle.json", kde_cases())
dump("eval_oracle.json", eval_cases())

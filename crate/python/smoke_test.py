"""Smoke test for the Python bindings.

Build the module first, e.g. `maturin develop -m crates/python/pyproject.toml`,
then run `python python/smoke_test.py`.
"""

import math

import axisprobe_py as ap


def main():
    words = ["he", "man", "she", "woman", "good", "great", "bad", "awful"]
    rows = [
        [1.0, 0.1, 0.0],
        [0.9, 0.0, 0.2],
        [-1.0, 0.1, 0.0],
        [-0.9, 0.2, 0.1],
        [-0.3, 0.2, 0.9],
        [-0.2, 0.1, 1.0],
        [0.4, 0.0, -0.9],
        [0.3, 0.1, -1.0],
    ]
    model = ap.Model.from_rows("toy", words, rows)
    assert len(model) == 8 and model.dim == 3
    v = model.vector("GOOD")
    assert v is not None and abs(math.sqrt(sum(x * x for x in v)) - 1.0) < 1e-6
    assert model.vector("GOOD", fallback="exact") is None

    spec = ap.AxisSpec("gender", ["he", "man"], ["she", "woman"], "male", "female")
    axis = spec.build(model)
    assert abs(sum(d * d for d in axis.direction) - 1.0) < 1e-9
    swapped = spec.swapped().build(model)
    assert all(a == -b for a, b in zip(axis.direction, swapped.direction))
    proj = dict(axis.project_words(model, ["good", "bad", "missing"]))
    assert set(proj) == {"good", "bad"} and proj["good"] > proj["bad"]

    r, p = ap.spearman([1, 2, 3, 4], [1, 3, 2, 4])
    assert abs(r - 0.8) < 1e-12 and 0 < p < 1

    lex = ap.Lexicon.from_pairs("toy", [("good", 1), ("great", 1), ("bad", -1), ("awful", -1)])
    assert len(lex) == 4 and lex.score("bad") == -1
    matrix = ap.screen([model], [spec], lex)
    cell = matrix["cells"][0]
    assert cell["status"]["status"] == "ok" and cell["correlation"]["coefficient"] > 0, cell
    assert matrix["family_size"] == 1

    report = ap.excise([model], spec, lex, fractions=[0.0, 0.5], repetitions=20, seed=3)
    assert report["rows"][0]["correlations"][0][0] == cell["correlation"]["coefficient"]

    ranked = ap.align(model, axis, [("good", "bad"), ("great", "awful"), ("he", "she")], top_k=2)
    assert len(ranked) == 2 and ranked[0][:2] == ("he", "she")
    print("axisprobe_py", ap.__version__, "smoke test passed")


if __name__ == "__main__":
    main()

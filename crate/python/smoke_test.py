"""Smoke test for the gmx Python module.

Build first:
    cargo build --release -p gmx-py --features extension-module
    cp target/release/libgmx.so python/gmx.so
then run from the repository root:
    PYTHONPATH=python python3 python/smoke_test.py
"""

import gmx

print("gmx", gmx.__version__)
assert "hamming7" in gmx.fixture_names()

h = gmx.fixture("hamming7")
assert (h.rows, h.cols) == (3, 7)
assert gmx.Matrix.from_alist(h.to_alist()) == h

tg = gmx.Model.tanner_graph(h)
assert tg.code_params() == (7, 4)
assert tg.realizes(h)
assert gmx.Model.from_gmf(tg.to_gmf()).realizes(h)
print("hamming7 census", tg.census())

h1, trace = gmx.extract_tg(h)
assert h1.n4() <= h.n4()
hx, meta, _, gtg = gmx.extract_gtg(h1)
assert gtg.code_params()[0] == 7
gm, _ = gmx.extract_gm(tg, 2)
assert gm.realizes(h) and gm.verify_qm(2)

llrs = [4.0, -1.0, 3.5, 2.0, 5.0, 0.5, 3.0]
hard, post = tg.decode(llrs, 20)
exact = gmx.map_llrs(h, llrs)
assert len(hard) == len(post) == len(exact) == 7

print(gmx.Model.tanner_graph(gmx.fixture("golay24")))

recs = tg.ber([2.0, 6.0], iterations=20, min_errors=50, max_bits=200_000, seed=1)
assert recs[1][2] * recs[0][1] <= recs[0][2] * recs[1][1]
print("ber", recs)

try:
    gmx.fixture("nope")
except gmx.GmxError as e:
    print("error ok:", e)
else:
    raise AssertionError("expected GmxError")

print("table1", gmx.table1_row("bch31_21"))
print("smoke test passed")

"""The bracket identities behind the closure analysis, verified exactly.

Every identity is evaluated with rational arithmetic, so "pass" means the
two sides agree term by term, deviation exactly zero.  Watch the nested
register brackets kill the chain term for longer registers, collapse the
coupling onto all-Z words, extract chain links one by one, and derive two
members by hand for the single-coupling two-level model.
"""

from accessor_ctrl import ControlModel, verify_lemma_suite

MODELS = {
    "two chained qubits": ControlModel.create(
        2, 2, [1, -1], [1, 1], [1], [1], []),
    "four chained qubits": ControlModel.create(
        2, 4, [1, -1], [1, 1, 1, 1], [1, 1, 1], [1], []),
    "three-level, three qubits, four couplings": ControlModel.create(
        3, 3, [-1, 0, 1], [1, 1, 1], [1, 1], [1, 2],
        [(1, 1, "YYY", 1), (2, 1, "YYX", 1), (1, 2, "YXY", 1), (2, 2, "XYY", 1)]),
    "two-level, single XX coupling": ControlModel.create(
        2, 1, [1, -1], [1], [], [1], [(1, 1, "X", 1)]),
}

for name, model in MODELS.items():
    print(f"=== {name}")
    for check in verify_lemma_suite(model):
        if check.status == "skipped":
            print(f"  {check.identity:45s} skipped  ({check.detail})")
        else:
            print(f"  {check.identity:45s} {check.status}   "
                  f"deviation={check.deviation}")
    print()

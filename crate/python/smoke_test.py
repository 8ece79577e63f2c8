"""Smoke test for the cylnogo extension module.

Uses an installed `cylnogo` if present, otherwise loads the library that
`cargo build -p cylnogo-python` leaves under target/.
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys


def load():
    try:
        import cylnogo

        return cylnogo
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libcylnogo.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("cylnogo", str(lib))
            spec = importlib.util.spec_from_file_location("cylnogo", lib, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("cylnogo not found: run `cargo build -p cylnogo-python` first")


def main():
    cy = load()
    assert cy.bracket("l*cos", "l*sin") == "l", cy.bracket("l*cos", "l*sin")
    assert cy.commutator("D", "E[2]") == "2*E[2]"
    assert cy.matrix_element("Q{type-i}(l)", 4, 4) == "4 + nu"
    q = cy.quantize("l*E[1]", "pos-rep", {"nu": "0", "eta": "0"})
    assert q == "1/2*E[1] + E[1]*D", q
    dim, pivots = cy.closure_basis(["preset:B"], 3, 5)
    assert dim == 4 and "e^1_0" in pivots, (dim, pivots)
    try:
        cy.bracket("l^2 *", "sin")
    except ValueError as e:
        assert "offset 5" in str(e)
    else:
        raise AssertionError("syntax error not raised")
    report = json.loads(cy.verify(["nogo-main", "iden"]))
    status = {c["name"]: c["status"] for c in report["checks"]}
    assert status == {"iden": "pass", "nogo-main": "inconsistent-as-expected"}, status
    print("smoke test ok")


if __name__ == "__main__":
    main()

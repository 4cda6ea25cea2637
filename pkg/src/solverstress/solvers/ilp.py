"""Deterministic LP-file export of the coverage problems.

Variable naming is fixed: X_<j> is 1 iff set j is selected, Y_<i> is 1 iff
element i (0-based element index, not node id) is covered.
"""

from __future__ import annotations

from ..core import ProblemInstance
from ..problems import _coverage_views

_WRAP = 12  # terms per line


def _join(terms: list[str], indent: str = "   ") -> str:
    if not terms:
        return indent + "0"
    lines = []
    for i in range(0, len(terms), _WRAP):
        chunk = terms[i:i + _WRAP]
        prefix = indent if i == 0 else indent + "+ "
        lines.append(prefix + " + ".join(chunk))
    return "\n".join(lines)


def export_ilp(inst: ProblemInstance) -> str:
    """Render an MC or MCSCC instance as LP-format text."""
    if inst.problem not in ("mc", "mcscc"):
        raise ValueError(f"ILP export only defined for coverage problems, got {inst.problem}")
    g = inst.graph
    m = g.set_count
    n_el = g.node_count - m
    indptr, members, weights, is_white, member_sets = _coverage_views(inst)
    covering: list[list[int]] = [[] for _ in range(n_el)]
    for s in range(m):
        for e in sorted(member_sets[s]):
            covering[e].append(s)

    out = []
    out.append(f"\\ solverstress {inst.problem} export: {m} sets, {n_el} elements")
    out.append("Maximize")
    obj_terms = [
        f"{float(weights[e])!r} Y_{e}"
        for e in range(n_el)
        if not is_white[e]
    ]
    out.append(" obj:")
    out.append(_join(obj_terms))
    out.append("Subject To")
    if inst.problem == "mc":
        out.append(" budget:")
        out.append(_join([f"X_{j}" for j in range(m)]) + f" <= {inst.k_sets}")
    else:
        white_terms = [f"Y_{e}" for e in range(n_el) if is_white[e]]
        if white_terms:
            out.append(" white_budget:")
            out.append(_join(white_terms) + f" <= {inst.k_white}")
    for e in range(n_el):
        cover = covering[e]
        lhs = [f"Y_{e}"] + [f"- X_{j}" for j in cover]
        out.append(f" link_{e}: " + " ".join(lhs) + " <= 0")
    if inst.problem == "mcscc":
        # white elements must be counted as covered when any covering set is on
        for e in range(n_el):
            if is_white[e]:
                for j in covering[e]:
                    out.append(f" force_{e}_{j}: Y_{e} - X_{j} >= 0")
    out.append("Binaries")
    names = [f"X_{j}" for j in range(m)] + [f"Y_{e}" for e in range(n_el)]
    for i in range(0, len(names), _WRAP):
        out.append(" " + " ".join(names[i:i + _WRAP]))
    out.append("End")
    return "\n".join(out) + "\n"

"""Fourier-Motzkin quantifier elimination for ordered Q-vector spaces.

Quantifiers are eliminated innermost first.  ``E v`` is pushed through
disjunctions and past conjuncts not mentioning ``v``; the remaining
conjunction is put in DNF and each disjunct is eliminated exactly (an
equality ``v = t`` is substituted, otherwise every lower bound is paired with
every upper bound; strictness plus density makes this exact).  ``A v`` is
``!E v !``.
"""

from __future__ import annotations

from itertools import product

from ..logic.syntax import And, Bot, Eq, Exists, Forall, Lt, Not, Or, Rel, Top
from ..memo import memoized
from .linear import (Key, coeff_of, var_key, from_nnf, make_atom, mk_and, mk_or, nnf_not, nnf_vars,
                     substitute_atom, to_nnf)

FEASIBILITY_CAP = 200
SIMPLIFY_FORMS = 14
SIMPLIFY_VARS = 4


def qe(phi, base=None):
    """Quantifier-free equivalent of ``phi`` as an AST formula."""
    return from_nnf(qe_nnf(phi, base))


def qe_nnf(phi, base=None):
    return prune(_qe(phi, base))


def _qe(phi, base):
    if isinstance(phi, (Top, Bot, Eq, Lt, Rel)):
        return to_nnf(phi, True, base)
    if isinstance(phi, Not):
        return nnf_not(_qe(phi.arg, base))
    if isinstance(phi, And):
        return mk_and([_qe(a, base) for a in phi.args])
    if isinstance(phi, Or):
        return mk_or([_qe(a, base) for a in phi.args])
    if isinstance(phi, Exists):
        return simplify(eliminate(phi.var, _qe(phi.body, base)))
    if isinstance(phi, Forall):
        return simplify(nnf_not(eliminate(phi.var, nnf_not(_qe(phi.body, base)))))
    raise TypeError(f"unsupported node {phi!r}")


def eliminate(v: str, node):
    """NNF equivalent of ``E v node``."""
    if node is True or node is False or v not in nnf_vars(node):
        return node
    tag = node[0]
    if tag == "atom":
        return True
    if tag == "or":
        return prune(mk_or([eliminate(v, n) for n in node[1]]))
    free, dep = [], []
    for n in node[1]:
        (dep if v in nnf_vars(n) else free).append(n)
    body = simplify(mk_and(dep))
    if body is True or body is False:
        return prune(mk_and(free + [body]))
    results = [fm_conjunction(v, c) for c in dnf([body])]
    return prune(mk_and(free + [mk_or(results)]))


def dnf(items):
    """Conjunctions of atoms whose disjunction is equivalent to ``And(items)``."""
    conjs = [()]
    for it in items:
        alts = _dnf_node(it)
        conjs = [c + a for c in conjs for a in alts]
        if len(conjs) > 64:
            conjs = [c for c in conjs if feasible(c)]
    return conjs


def _dnf_node(node):
    if node is True:
        return [()]
    if node is False:
        return []
    tag = node[0]
    if tag == "atom":
        return [(node[1],)]
    if tag == "or":
        out = []
        for n in node[1]:
            out.extend(_dnf_node(n))
        return out
    return dnf(node[1])


def fm_conjunction(v: str, atoms):
    """Eliminate ``v`` from a conjunction of atoms; returns an NNF node."""
    atoms = list(dict.fromkeys(atoms))
    for a in atoms:
        if a[0] == "=" and coeff_of(a, v) != 0:
            c = coeff_of(a, v)
            rest = {w: -d / c for w, d in a[1] if w != v}
            const = -a[2] / c
            out = []
            for b in atoms:
                if b is a:
                    continue
                nb = substitute_atom(b, v, rest, const)
                if nb is False:
                    return False
                if nb is not True:
                    out.append(("atom", nb))
            return mk_and(out)
    lowers, uppers, out = [], [], []
    for a in atoms:
        c = coeff_of(a, v)
        if c == 0:
            out.append(("atom", a))
            continue
        bound = ({w: -d / c for w, d in a[1] if w != v}, -a[2] / c)
        (uppers if c > 0 else lowers).append(bound)
    for lo_c, lo_k in lowers:
        for up_c, up_k in uppers:
            diff = dict(lo_c)
            for w, d in up_c.items():
                diff[w] = diff.get(w, 0) - d
            na = make_atom("<", diff, lo_k - up_k)
            if na is False:
                return False
            if na is not True:
                out.append(("atom", na))
    return mk_and(out)


def feasible(atoms) -> bool:
    """Satisfiability of a conjunction of atoms (FM to the empty signature)."""
    return _feasible(frozenset(atoms))


@memoized
def _feasible(atoms) -> bool:
    cur = sorted(atoms, key=_atom_key)
    while True:
        if len(cur) > FEASIBILITY_CAP:
            return True
        vs = set()
        for a in cur:
            vs.update(w for w, _ in a[1])
        if not vs:
            return True
        v = min(vs, key=lambda w: sum(1 for a in cur if coeff_of(a, w) != 0))
        res = fm_conjunction(v, cur)
        if res is False:
            return False
        if res is True:
            return True
        cur = [res[1]] if res[0] == "atom" else [n[1] for n in res[1]]


def _atom_key(a):
    return (a[0], [(var_key(v), c) for v, c in a[1]], a[2])


def _atoms_of_conj(node):
    if node[0] == "atom":
        return (node[1],)
    if node[0] == "and" and all(n is not True and n is not False and n[0] == "atom" for n in node[1]):
        return tuple(n[1] for n in node[1])
    return None


def _conj_node(atoms):
    return mk_and([("atom", a) for a in atoms])


def reduce_conjunction(atoms):
    """Substitute equalities, drop implied atoms; None when infeasible."""
    atoms = list(dict.fromkeys(atoms))
    if not feasible(atoms):
        return None
    done = []
    while True:
        eq = next((a for a in atoms if a[0] == "=" and a not in done), None)
        if eq is None:
            break
        done.append(eq)
        v, c = eq[1][0]
        rest = {w: -d / c for w, d in eq[1][1:]}
        new = []
        for b in atoms:
            nb = b if b is eq else substitute_atom(b, v, rest, -eq[2] / c)
            if nb is False:
                return None
            if nb is not True:
                new.append(nb)
        atoms = list(dict.fromkeys(new))
    i = 0
    while i < len(atoms):
        rest = atoms[:i] + atoms[i + 1:]
        neg = nnf_not(("atom", atoms[i]))
        alts = [neg[1]] if neg[0] == "atom" else [n[1] for n in neg[1]]
        if all(not feasible(rest + [b]) for b in alts):
            atoms = rest
        else:
            i += 1
    return tuple(atoms)


def _form(atom):
    """``(form, flip)`` with the form scaled to leading coefficient 1."""
    rel, coeffs, const = atom
    lead = coeffs[0][1]
    if lead == 1:
        return (coeffs, const), 1
    return (tuple((v, c / lead) for v, c in coeffs), const / lead), (1 if lead > 0 else -1)


def _sign_atom(form, sign):
    coeffs, const = form
    if sign == 0:
        return Key(("=", coeffs, const))
    if sign < 0:
        return Key(("<", coeffs, const))
    return make_atom("<", {v: -c for v, c in coeffs}, -const)


def _compile(node, index):
    """Node over form indices: ``(0, i, flip)`` for ``<``, ``(1, i)`` for ``=``."""
    if node is True or node is False:
        return node
    if node[0] == "atom":
        f, flip = _form(node[1])
        i = index.setdefault(f, len(index))
        return (1, i) if node[1][0] == "=" else (0, i, flip)
    return (2 if node[0] == "and" else 3, tuple(_compile(n, index) for n in node[1]))


def _count_forms(c, uses):
    if c is True or c is False:
        return
    if c[0] < 2:
        uses[c[1]] = uses.get(c[1], 0) + 1
        return
    for n in c[1]:
        _count_forms(n, uses)


def _residual(c, i: int, sg: int):
    """``c`` with form ``i`` fixed to sign ``sg``: True, False or a smaller node."""
    if c is True or c is False:
        return c
    tag = c[0]
    if tag < 2:
        if c[1] != i:
            return c
        return sg == 0 if tag == 1 else sg * c[2] < 0
    parts = []
    for n in c[1]:
        v = _residual(n, i, sg)
        if v is True or v is False:
            if (v is False) == (tag == 2):
                return v
            continue
        parts.append(v)
    if not parts:
        return tag == 2
    return parts[0] if len(parts) == 1 else (tag, tuple(parts))


@memoized
def simplify(node):
    """Equivalent small DNF.

    Splits on the signs of the distinct linear forms, pruning infeasible
    branches and stopping once the formula's value is settled; the true
    branches are then merged.  Falls back to the input when there are more
    than ``SIMPLIFY_FORMS`` forms or ``SIMPLIFY_VARS`` variables.
    """
    if node is True or node is False or node[0] == "atom":
        return node
    if len(nnf_vars(node)) > SIMPLIFY_VARS:
        return prune(node)
    index: dict = {}
    compiled = _compile(node, index)
    if len(index) > SIMPLIFY_FORMS:
        return prune(node)
    uses: dict = {}
    _count_forms(compiled, uses)
    forms = sorted(index, key=lambda f: (-uses.get(index[f], 0), f[0], f[1]))
    cells = []

    def walk(i, c, atoms):
        if c is False:
            return
        if c is True:
            cells.append(tuple(atoms))
            return
        f = forms[i]
        for sg in (-1, 0, 1):
            a = _sign_atom(f, sg)
            if feasible(atoms + [a]):
                walk(i + 1, _residual(c, index[f], sg), atoms + [a])

    walk(0, compiled, [])
    if not cells:
        return False
    if any(not c for c in cells):
        return True
    out = _merge(mk_or([_conj_node(c) for c in cells]))
    if out is True or out is False or out[0] == "atom":
        return out
    parts = out[1] if out[0] == "or" else (out,)
    reduced = []
    for p in parts:
        at = _atoms_of_conj(p)
        r = reduce_conjunction(at)
        if r is not None:
            reduced.append(_conj_node(sorted(r)))
    return mk_or(reduced)


def _merge(node):
    """Replace a group ``K & a1 | .. | K & ak`` by ``K`` when ``K`` implies some ``ai``."""
    if node is True or node is False or node[0] != "or":
        return node
    items = [_atoms_of_conj(n) for n in node[1]]
    if any(it is None for it in items):
        return node
    sets = {frozenset(it) for it in items}
    changed = True
    while changed:
        changed = False
        groups: dict = {}
        for c in sets:
            for a in c:
                groups.setdefault(c - {a}, []).append(a)
        for key in sorted(groups, key=lambda k: (len(k), sorted(k))):
            alts = groups[key]
            if len(alts) > 1 and len(alts) <= 4 and _covers(key, alts):
                sets = {c for c in sets if not (key < c and len(c - key) == 1 and next(iter(c - key)) in alts)}
                sets.add(key)
                changed = True
                break
    sets = sorted(sets, key=lambda c: (len(c), sorted(c)))
    sets = [c for i, c in enumerate(sets) if not any(d < c for d in sets[:i])]
    return mk_or([_conj_node(sorted(c)) for c in sets])


def _covers(common, alts) -> bool:
    """Whether ``common`` implies the disjunction of ``alts``."""
    negs = []
    for a in alts:
        n = nnf_not(("atom", a))
        negs.append([n[1]] if n[0] == "atom" else [x[1] for x in n[1]])
    return all(not feasible(list(common) + list(pick)) for pick in product(*negs))


def prune(node):
    """Drop infeasible and subsumed disjuncts of DNF-shaped nodes."""
    if node is True or node is False:
        return node
    if node[0] == "and":
        at = _atoms_of_conj(node)
        if at is not None and not feasible(at):
            return False
        return node
    if node[0] != "or":
        return node
    keep = []
    for n in node[1]:
        at = _atoms_of_conj(n)
        if at is not None:
            if not feasible(at):
                continue
            keep.append((frozenset(at), n))
        else:
            keep.append((None, n))
    out = []
    for i, (s, n) in enumerate(keep):
        if s is not None and any(
            t is not None and t < s or (t == s and j < i)
            for j, (t, _) in enumerate(keep) if j != i
        ):
            continue
        out.append(n)
    return mk_or(out)

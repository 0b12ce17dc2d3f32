"""Complexes presented by labeled summands with symbolic differential blocks.

A term of a block complex is a list of summands, each either

* ``Proj(v)`` — the left ideal ``R e_v`` of the ring, labeled by vertex, or
* ``Opaque(module, tag)`` — an explicit module kept opaque; the main case is
  a cyclic summand generated by a single vector ``gen`` whose relations are
  "the two one-sided actions of ``base`` agree on ``gen``" (the regular
  bimodule of an algebra, viewed over its enveloping ring).

Differential entries are stored structurally:

* Proj → Proj: a ring element ``w`` with support in ``e_v R e_u`` acting by
  right multiplication;
* Proj → Opaque: the image vector of the idempotent generator;
* Opaque → Proj / Opaque → Opaque: a dense matrix.

This keeps Gaussian elimination (minimization), tensor products over the
underlying algebra, duals, and chain-map searches cheap and exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Union

import numpy as np

from . import linalg as la
from .algebra import Algebra
from .modules import Module, IsoKind, IsoResult
from .complexes import Complex, ComplexError, DenseChainMap


class BudgetExceeded(ComplexError):
    pass


class NotProjectiveTerms(ComplexError):
    pass


@dataclass
class Proj:
    vertex: int

    @property
    def tag(self) -> str:
        return f"P{self.vertex}"


@dataclass
class Opaque:
    module: Module
    label: str
    base: Optional[Algebra] = None
    gen: Optional[np.ndarray] = None

    @property
    def tag(self) -> str:
        return f"O:{self.label}"


Summand = Union[Proj, Opaque]


def _idx(ring: Algebra, v: int) -> list[int]:
    return ring.left_ideal_indices(v)


def summand_dim(ring: Algebra, s: Summand) -> int:
    if isinstance(s, Proj):
        return len(_idx(ring, s.vertex))
    return s.module.dim


def _pad(ring: Algebra, vals: np.ndarray, v: int) -> np.ndarray:
    """Lift coordinates over R e_v to full ring coordinates."""
    out = ring.field.zeros(ring.dim)
    out[_idx(ring, v)] = vals
    return out


def _restrict(ring: Algebra, full: np.ndarray, v: int) -> np.ndarray:
    return full[_idx(ring, v)].copy()


def po_dense(ring: Algebra, s: Proj, target: Module, m0: np.ndarray) -> np.ndarray:
    """Dense matrix of the map R e_v -> M sending x to x·m0."""
    f = ring.field
    idx = _idx(ring, s.vertex)
    cols = [target.rho(ring.basis_vector(k)) @ m0 for k in idx]
    return f.normalize(np.stack(cols, axis=1)) if cols else f.zeros((target.dim, 0))


def pp_dense(ring: Algebra, s: Proj, t: Proj, w: np.ndarray) -> np.ndarray:
    f = ring.field
    rm = ring.rmul(w)
    return f.normalize(rm[np.ix_(_idx(ring, t.vertex), _idx(ring, s.vertex))].copy())


def block_dense(ring: Algebra, s: Summand, t: Summand, val: np.ndarray) -> np.ndarray:
    if isinstance(s, Proj) and isinstance(t, Proj):
        return pp_dense(ring, s, t, val)
    if isinstance(s, Proj):
        return po_dense(ring, s, t.module, val)
    return val


def compose_blocks(ring: Algebra, s: Summand, m: Summand, t: Summand,
                   a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Value of (s -> m with value a) followed by (m -> t with value b)."""
    f = ring.field
    if isinstance(s, Proj):
        if isinstance(m, Proj):
            if isinstance(t, Proj):
                return ring.multiply(a, b)
            # t opaque: image of e_{v_s} is (e_s · a) · b = rho(a) b
            return f.normalize(t.module.rho(a) @ b)
        # m opaque: a is the image vector in M_m, b maps out of M_m densely
        out = f.normalize(b @ a)
        if isinstance(t, Proj):
            return _pad(ring, out, t.vertex)
        return out
    # s opaque: a is dense from M_s
    if isinstance(m, Proj):
        if isinstance(t, Proj):
            rm = ring.rmul(b)
            sub = rm[np.ix_(_idx(ring, t.vertex), _idx(ring, m.vertex))]
            return f.normalize(sub @ a)
        cols = [t.module.rho(ring.basis_vector(k)) @ b for k in _idx(ring, m.vertex)]
        c2 = np.stack(cols, axis=1) if cols else f.zeros((t.module.dim, 0))
        return f.normalize(f.normalize(c2) @ a)
    return f.normalize(b @ a)


def _is_zero(f, val) -> bool:
    return bool(f.equal(val, f.zeros(val.shape)))


class BlockComplex:
    def __init__(self, ring: Algebra, terms: dict[int, list[Summand]],
                 blocks: dict[int, dict[tuple[int, int], np.ndarray]],
                 check: bool = False):
        self.ring = ring
        self.field = ring.field
        self.terms = {i: list(ts) for i, ts in terms.items() if ts}
        self.blocks = {}
        for i, bs in blocks.items():
            kept = {k: v for k, v in bs.items() if not _is_zero(self.field, v)}
            if kept and i in self.terms and (i + 1) in self.terms:
                self.blocks[i] = kept
        if check:
            self.validate()

    @property
    def degrees(self) -> list[int]:
        return sorted(self.terms)

    def summands(self, i: int) -> list[Summand]:
        return self.terms.get(i, [])

    def dim(self, i: int) -> int:
        return sum(summand_dim(self.ring, s) for s in self.summands(i))

    def labels(self, i: int) -> list[str]:
        return sorted(s.tag for s in self.summands(i))

    def total_summands(self) -> int:
        return sum(len(ts) for ts in self.terms.values())

    def block(self, i: int, t: int, s: int):
        return self.blocks.get(i, {}).get((t, s))

    def validate(self) -> None:
        for i in self.degrees:
            if (i + 1) not in self.terms or (i + 2) not in self.terms:
                continue
            bi = self.blocks.get(i, {})
            bj = self.blocks.get(i + 1, {})
            if not bi or not bj:
                continue
            src = self.summands(i)
            mid = self.summands(i + 1)
            tgt = self.summands(i + 2)
            for si, s in enumerate(src):
                for ti, t in enumerate(tgt):
                    acc = None
                    for mi, m in enumerate(mid):
                        a = bi.get((mi, si))
                        b = bj.get((ti, mi))
                        if a is None or b is None:
                            continue
                        val = compose_blocks(self.ring, s, m, t, a, b)
                        acc = val if acc is None else \
                            self.field.normalize(acc + val)
                    if acc is not None and not _is_zero(self.field, acc):
                        raise ComplexError(
                            f"block d² != 0 at degree {i} ({si} -> {ti})")

    # -- conversions -----------------------------------------------------

    def summand_module(self, s: Summand) -> Module:
        if isinstance(s, Proj):
            return Module.projective(self.ring, s.vertex)
        return s.module

    def to_dense(self) -> Complex:
        f = self.field
        terms = {}
        for i, ts in self.terms.items():
            mods = [self.summand_module(s) for s in ts]
            terms[i] = Module.direct_sum(self.ring, mods)
        diffs = {}
        for i, bs in self.blocks.items():
            src = self.summands(i)
            tgt = self.summands(i + 1)
            sdims = [summand_dim(self.ring, s) for s in src]
            tdims = [summand_dim(self.ring, t) for t in tgt]
            soff = np.concatenate([[0], np.cumsum(sdims)])
            toff = np.concatenate([[0], np.cumsum(tdims)])
            d = f.zeros((int(toff[-1]), int(soff[-1])))
            for (ti, si), val in bs.items():
                dense = block_dense(self.ring, src[si], tgt[ti], val)
                d[toff[ti]:toff[ti] + tdims[ti],
                  soff[si]:soff[si] + sdims[si]] = dense
            diffs[i] = d
        return Complex(self.ring, terms, diffs, check=False)

    def scale(self, c) -> "BlockComplex":
        f = self.field
        blocks = {i: {k: f.normalize(f.scalar(c) * v) for k, v in bs.items()}
                  for i, bs in self.blocks.items()}
        return BlockComplex(self.ring, self.terms, blocks)

    def shift(self, n: int) -> "BlockComplex":
        f = self.field
        sign = f.scalar((-1) ** n)
        terms = {i - n: ts for i, ts in self.terms.items()}
        blocks = {i - n: {k: f.normalize(sign * v) for k, v in bs.items()}
                  for i, bs in self.blocks.items()}
        return BlockComplex(self.ring, terms, blocks)


@dataclass
class BlockChainMap:
    source: BlockComplex
    target: BlockComplex
    blocks: dict[int, dict[tuple[int, int], np.ndarray]] = dc_field(default_factory=dict)

    def to_dense(self) -> DenseChainMap:
        f = self.source.field
        xs, ys = self.source, self.target
        mats = {}
        for i in set(xs.terms) | set(ys.terms):
            src = xs.summands(i)
            tgt = ys.summands(i)
            sdims = [summand_dim(xs.ring, s) for s in src]
            tdims = [summand_dim(ys.ring, t) for t in tgt]
            soff = np.concatenate([[0], np.cumsum(sdims)]) if sdims else np.array([0])
            toff = np.concatenate([[0], np.cumsum(tdims)]) if tdims else np.array([0])
            m = f.zeros((int(toff[-1]), int(soff[-1])))
            for (ti, si), val in self.blocks.get(i, {}).items():
                dense = block_dense(xs.ring, src[si], tgt[ti], val)
                m[toff[ti]:toff[ti] + tdims[ti],
                  soff[si]:soff[si] + sdims[si]] = dense
            mats[i] = m
        return DenseChainMap(self.source.to_dense(), self.target.to_dense(), mats)

    def check(self) -> bool:
        """Commutation with the differentials, blockwise."""
        xs, ys, ring = self.source, self.target, self.source.ring
        f = xs.field
        for i in set(xs.terms) | set(ys.terms):
            src = xs.summands(i)
            tgt = ys.summands(i + 1)
            for si, s in enumerate(src):
                for ti, t in enumerate(tgt):
                    acc = None
                    for mi, m in enumerate(ys.summands(i)):
                        fb = self.blocks.get(i, {}).get((mi, si))
                        db = ys.blocks.get(i, {}).get((ti, mi))
                        if fb is None or db is None:
                            continue
                        val = compose_blocks(ring, s, m, t, fb, db)
                        acc = val if acc is None else f.normalize(acc + val)
                    for mi, m in enumerate(xs.summands(i + 1)):
                        db = xs.blocks.get(i, {}).get((mi, si))
                        fb = self.blocks.get(i + 1, {}).get((ti, mi))
                        if db is None or fb is None:
                            continue
                        val = f.normalize(-compose_blocks(ring, s, m, t,
                                                          db, fb))
                        acc = val if acc is None else f.normalize(acc + val)
                    if acc is not None and not _is_zero(f, acc):
                        return False
        return True


def identity_block(ring: Algebra, s: Summand) -> np.ndarray:
    if isinstance(s, Proj):
        return ring.idempotent_vector(s.vertex)
    return ring.field.eye(s.module.dim)


def block_cone(fmap: BlockChainMap) -> tuple[BlockComplex, BlockChainMap, BlockChainMap]:
    """cone^i = X^{i+1} ⊕ Y^i with d(x, y) = (−dx, f(x) + dy)."""
    x, y = fmap.source, fmap.target
    ring = x.ring
    f = x.field
    terms: dict[int, list[Summand]] = {}
    degs = set(i - 1 for i in x.terms) | set(y.terms)
    xcount: dict[int, int] = {}
    for i in sorted(degs):
        ts = list(x.summands(i + 1)) + list(y.summands(i))
        xcount[i] = len(x.summands(i + 1))
        if ts:
            terms[i] = ts
    blocks: dict[int, dict[tuple[int, int], np.ndarray]] = {}
    for i in sorted(degs):
        out: dict[tuple[int, int], np.ndarray] = {}
        nx_t = xcount.get(i + 1, 0)
        for (ti, si), val in x.blocks.get(i + 1, {}).items():
            out[(ti, si)] = f.normalize(-val)
        for (ti, si), val in fmap.blocks.get(i + 1, {}).items():
            out[(nx_t + ti, si)] = val
        for (ti, si), val in y.blocks.get(i, {}).items():
            out[(nx_t + ti, xcount[i] + si)] = val
        if out:
            blocks[i] = out
    c = BlockComplex(ring, terms, blocks)
    inc = BlockChainMap(y, c)
    for i in y.terms:
        inc.blocks[i] = {(xcount.get(i, 0) + k, k): identity_block(ring, s)
                         for k, s in enumerate(y.summands(i))}
    proj = BlockChainMap(c, x.shift(1))
    for i in sorted(degs):
        if x.summands(i + 1):
            proj.blocks[i] = {(k, k): identity_block(ring, s)
                              for k, s in enumerate(x.summands(i + 1))}
    return c, inc, proj


# ----------------------------------------------------------------------
# minimization
# ----------------------------------------------------------------------

def _pp_scalar(ring: Algebra, w: np.ndarray, v: int):
    lam = ring.semisimple_functionals()[v]
    return ring.field.normalize(lam @ w)


def _pivot_inverse(ring: Algebra, s: Proj, t: Proj, w: np.ndarray) -> np.ndarray:
    """Inverse of x ↦ x·w in the local corner e_v R e_v."""
    f = ring.field
    ev = ring.idempotent_vector(s.vertex)
    winv = la.solve(f, ring.lmul(w), ev)
    if winv is None:
        raise ComplexError("pivot not invertible")
    if not f.equal(ring.multiply(winv, w), ev) or \
            not f.equal(ring.multiply(w, winv), ev):
        raise ComplexError("pivot inverse failed")
    return winv


def minimize_blocks(bc: BlockComplex, max_steps: Optional[int] = None,
                    check: bool = True) -> BlockComplex:
    """Cancel invertible differential components until none remain."""
    ring = bc.ring
    f = bc.field
    terms = {i: list(ts) for i, ts in bc.terms.items()}
    blocks = {i: dict(bs) for i, bs in bc.blocks.items()}
    steps = 0
    while True:
        pivot = None
        for i in sorted(blocks):
            src = terms.get(i, [])
            tgt = terms.get(i + 1, [])
            for (ti, si), w in blocks[i].items():
                s, t = src[si], tgt[ti]
                if isinstance(s, Proj) and isinstance(t, Proj):
                    if s.vertex == t.vertex and \
                            _pp_scalar(ring, w, s.vertex) != f.zero:
                        pivot = (i, ti, si)
                        break
                elif isinstance(s, Opaque) and isinstance(t, Opaque):
                    if s.module.dim == t.module.dim and \
                            la.is_invertible(f, w):
                        pivot = (i, ti, si)
                        break
            if pivot:
                break
        if pivot is None:
            break
        if max_steps is not None and steps >= max_steps:
            raise BudgetExceeded(f"minimization budget {max_steps} exhausted")
        steps += 1
        i, ti, si = pivot
        src = terms[i]
        tgt = terms[i + 1]
        s, t = src[si], tgt[ti]
        w = blocks[i][(ti, si)]
        if isinstance(s, Proj):
            inv = _pivot_inverse(ring, s, t, w)
        else:
            inv = la.invert(f, w)
        cur = blocks[i]
        into_t = {sj: val for (tj, sj), val in cur.items()
                  if tj == ti and sj != si}
        from_s = {tj: val for (tj, sj), val in cur.items()
                  if sj == si and tj != ti}
        for sj, a in into_t.items():
            c1 = compose_blocks(ring, src[sj], t, s, a, inv)
            for tj, b in from_s.items():
                upd = compose_blocks(ring, src[sj], s, tgt[tj], c1, b)
                old = cur.get((tj, sj))
                new = f.normalize(old - upd) if old is not None else \
                    f.normalize(-upd)
                if _is_zero(f, new):
                    cur.pop((tj, sj), None)
                else:
                    cur[(tj, sj)] = new
        # drop summand si at degree i and ti at degree i+1, reindex
        _remove_summand(terms, blocks, i, si)
        _remove_summand(terms, blocks, i + 1, ti)
    out = BlockComplex(ring, terms, blocks)
    if check:
        out.validate()
    return out


def _remove_summand(terms, blocks, deg, k):
    ts = terms.get(deg, [])
    ts.pop(k)
    if not ts:
        terms.pop(deg, None)
    else:
        terms[deg] = ts
    # maps out of degree `deg`: sources reindex
    bs = blocks.get(deg, {})
    nb = {}
    for (ti, si), val in bs.items():
        if si == k:
            continue
        nb[(ti, si - 1 if si > k else si)] = val
    if nb:
        blocks[deg] = nb
    else:
        blocks.pop(deg, None)
    # maps into degree `deg`: targets reindex
    bs = blocks.get(deg - 1, {})
    nb = {}
    for (ti, si), val in bs.items():
        if ti == k:
            continue
        nb[(ti - 1 if ti > k else ti, si)] = val
    if nb:
        blocks[deg - 1] = nb
    else:
        blocks.pop(deg - 1, None)


# ----------------------------------------------------------------------
# labeling dense complexes
# ----------------------------------------------------------------------

def labelify_module(m: Module) -> tuple[list[Proj], np.ndarray]:
    """Recognize a module as a sum of labeled projectives.

    Returns (summand list, change of basis) where the matrix maps summand
    coordinates (concatenated in list order) to the module's coordinates.
    Raises NotProjectiveTerms when the module is not projective.
    """
    from .modules import projective_cover
    cover, epi, verts = projective_cover(m)
    if cover.dim != m.dim:
        raise NotProjectiveTerms(
            f"module of dim {m.dim} is not projective (minimal cover has "
            f"dim {cover.dim})")
    return [Proj(v) for v in verts], epi.matrix


def _as_pp_value(ring: Algebra, s: Proj, t: Proj, dense: np.ndarray) -> np.ndarray:
    f = ring.field
    idx_s = _idx(ring, s.vertex)
    col = idx_s.index(ring.idem[s.vertex])
    w = _pad(ring, dense[:, col].copy(), t.vertex)
    if not f.equal(pp_dense(ring, s, t, w), dense):
        raise ComplexError("component is not right multiplication by its "
                           "generator image")
    return w


def _as_po_value(ring: Algebra, s: Proj, t: Opaque, dense: np.ndarray) -> np.ndarray:
    f = ring.field
    idx_s = _idx(ring, s.vertex)
    col = idx_s.index(ring.idem[s.vertex])
    m0 = dense[:, col].copy()
    if not f.equal(po_dense(ring, s, t.module, m0), dense):
        raise ComplexError("component is not determined by its generator image")
    return m0


def dense_to_blocks(c: Complex,
                    opaque: Optional[dict[int, Opaque]] = None) -> BlockComplex:
    """Label each term of a dense complex; terms listed in ``opaque`` are
    kept as given (the summand must match the term's dimension)."""
    opaque = opaque or {}
    ring = c.algebra
    f = c.field
    terms: dict[int, list[Summand]] = {}
    bases: dict[int, np.ndarray] = {}
    for i, t in c.terms.items():
        if i in opaque:
            s = opaque[i]
            if s.module.dim != t.dim:
                raise ComplexError("opaque annotation dimension mismatch")
            terms[i] = [s]
            bases[i] = f.eye(t.dim)
        else:
            sums, basis = labelify_module(t)
            terms[i] = sums
            bases[i] = basis
    blocks: dict[int, dict[tuple[int, int], np.ndarray]] = {}
    for i, d in c.diffs.items():
        binv = la.invert(f, bases[i + 1])
        dd = f.normalize(binv @ f.normalize(d @ bases[i]))
        src = terms[i]
        tgt = terms[i + 1]
        sdims = [summand_dim(ring, s) for s in src]
        tdims = [summand_dim(ring, t) for t in tgt]
        soff = np.concatenate([[0], np.cumsum(sdims)])
        toff = np.concatenate([[0], np.cumsum(tdims)])
        out = {}
        for si, s in enumerate(src):
            for ti, t in enumerate(tgt):
                sub = dd[toff[ti]:toff[ti] + tdims[ti],
                         soff[si]:soff[si] + sdims[si]].copy()
                if _is_zero(f, sub):
                    continue
                if isinstance(s, Proj) and isinstance(t, Proj):
                    out[(ti, si)] = _as_pp_value(ring, s, t, sub)
                elif isinstance(s, Proj):
                    out[(ti, si)] = _as_po_value(ring, s, t, sub)
                else:
                    out[(ti, si)] = sub
        if out:
            blocks[i] = out
    return BlockComplex(ring, terms, blocks)


def minimize_dense(c: Complex, max_steps: Optional[int] = None) -> Complex:
    """Minimize a dense complex whose terms are projective."""
    return minimize_blocks(dense_to_blocks(c), max_steps=max_steps).to_dense()


# ----------------------------------------------------------------------
# tensor product over the underlying algebra (enveloping rings)
# ----------------------------------------------------------------------

def _env_parts(ring: Algebra) -> Algebra:
    base = getattr(ring, "env_left", None)
    if base is None or getattr(ring, "env_right", None) is not base:
        raise ComplexError("block tensor needs an enveloping ring of a "
                           "single algebra")
    return base


def _vsplit(base: Algebra, vertex: int) -> tuple[int, int]:
    nv = base.n_vertices
    return vertex // nv, vertex % nv


def _vjoin(base: Algebra, a: int, b: int) -> int:
    return a * base.n_vertices + b


def tensor_blocks(x: BlockComplex, y: BlockComplex) -> BlockComplex:
    """Total complex of x ⊗_A y for block complexes over env(A, A).

    Supported summands: Proj (the bimodules A e_a ⊗ e_b A) and Opaque
    tagged cyclic-unit summands (the regular bimodule). The tensor
    contracts e_b A ⊗_A A e_c to the Peirce space e_b A e_c.
    """
    ring = x.ring
    if y.ring is not ring:
        raise ComplexError("block tensor requires a shared ring")
    base = _env_parts(ring)
    f = ring.field
    nv = base.n_vertices

    # summand bookkeeping: key (p, q, sx, sy, mid) -> (degree index position)
    terms: dict[int, list[Summand]] = {}
    keys: dict[int, list[tuple]] = {}
    pos: dict[tuple, tuple[int, int]] = {}

    def peirce(b: int, c: int) -> list[int]:
        return base.peirce_indices(b, c)

    for p in sorted(x.terms):
        for q in sorted(y.terms):
            n = p + q
            for si, s in enumerate(x.summands(p)):
                for ti, t in enumerate(y.summands(q)):
                    new: list[tuple[tuple, Summand]] = []
                    if isinstance(s, Proj) and isinstance(t, Proj):
                        a, b = _vsplit(base, s.vertex)
                        c, d = _vsplit(base, t.vertex)
                        for mi in peirce(b, c):
                            new.append(((p, q, si, ti, mi),
                                        Proj(_vjoin(base, a, d))))
                    elif isinstance(s, Proj):
                        new.append(((p, q, si, ti, None), Proj(s.vertex)))
                    elif isinstance(t, Proj):
                        new.append(((p, q, si, ti, None), Proj(t.vertex)))
                    else:
                        new.append(((p, q, si, ti, None),
                                    Opaque(t.module, t.label, t.base, t.gen)))
                    for key, summand in new:
                        lst = terms.setdefault(n, [])
                        keys.setdefault(n, [])
                        pos[key] = (n, len(lst))
                        lst.append(summand)
                        keys[n].append(key)

    blocks: dict[int, dict[tuple[int, int], np.ndarray]] = {}

    def add_block(n: int, tpos: int, spos: int, val: np.ndarray):
        if _is_zero(f, val):
            return
        bs = blocks.setdefault(n, {})
        old = bs.get((tpos, spos))
        new = f.normalize(old + val) if old is not None else val
        if _is_zero(f, new):
            bs.pop((tpos, spos), None)
        else:
            bs[(tpos, spos)] = new

    dA = base.dim

    # left-complex differentials tensored with identity on the right factor
    for p in sorted(x.blocks):
        for (ti2, si2), w in x.blocks[p].items():
            s = x.summands(p)[si2]
            t2 = x.summands(p + 1)[ti2]
            for q in sorted(y.terms):
                n = p + q
                for ti, ysum in enumerate(y.summands(q)):
                    _tensor_left_block(ring, base, f, nv, dA, pos, add_block,
                                       n, p, q, si2, ti2, ti, s, t2, ysum, w)

    # right-complex differentials with Koszul sign (−1)^p
    for q in sorted(y.blocks):
        for (ti2, si2), w in y.blocks[q].items():
            s = y.summands(q)[si2]
            t2 = y.summands(q + 1)[ti2]
            for p in sorted(x.terms):
                n = p + q
                sign = f.scalar((-1) ** p)
                for si, xsum in enumerate(x.summands(p)):
                    _tensor_right_block(ring, base, f, nv, dA, pos, add_block,
                                        n, p, q, si, si2, ti2, xsum, s, t2,
                                        f.normalize(sign * w))
    return BlockComplex(ring, terms, blocks)


def _tensor_left_block(ring, base, f, nv, dA, pos, add_block, n, p, q,
                       si2, ti2, ti, s, t2, ysum, w):
    """Contribution of a left-factor block (s -> t2, value w) against the
    static right summand ysum."""
    if isinstance(ysum, Proj):
        c, d = _vsplit(base, ysum.vertex)
        idem_d = base.idem[d]
        if isinstance(s, Proj) and isinstance(t2, Proj):
            a, b = _vsplit(base, s.vertex)
            a2, b2 = _vsplit(base, t2.vertex)
            W = w.reshape(dA, dA)
            mids = base.peirce_indices(b, c)
            tmids = base.peirce_indices(b2, c)
            for mb in mids:
                skey = (p, q, si2, ti, mb)
                T = base.mul[:, mb, :]          # T[j, mc]
                O = f.normalize(W @ T)          # O[i, mc]
                for mc in tmids:
                    col = O[:, mc]
                    if _is_zero(f, col):
                        continue
                    val = f.zeros(ring.dim)
                    val[(np.arange(dA)) * dA + idem_d] = col
                    add_block(n, pos[(p + 1, q, ti2, ti, mc)][1],
                              pos[skey][1], val)
        elif isinstance(s, Proj) and isinstance(t2, Opaque):
            # left po block with value z (a vector of the base algebra)
            a, b = _vsplit(base, s.vertex)
            z = w
            for mb in base.peirce_indices(b, c):
                zm = f.normalize(np.tensordot(z, base.mul[:, mb, :], (0, 0)))
                if _is_zero(f, zm):
                    continue
                val = f.zeros(ring.dim)
                val[(np.arange(dA)) * dA + idem_d] = zm
                add_block(n, pos[(p + 1, q, ti2, ti, None)][1],
                          pos[(p, q, si2, ti, mb)][1], val)
        elif isinstance(s, Opaque) and isinstance(t2, Proj):
            # dense block out of a cyclic-unit summand
            B1 = f.normalize(w @ s.gen)
            a2, b2 = _vsplit(base, t2.vertex)
            idx_t = _idx(ring, t2.vertex)
            full = f.zeros(ring.dim)
            full[idx_t] = B1
            W1 = full.reshape(dA, dA)
            for j in range(dA):
                if base.rv[j] != c:
                    continue
                col = W1[:, j]
                if _is_zero(f, col):
                    continue
                val = f.zeros(ring.dim)
                val[(np.arange(dA)) * dA + idem_d] = col
                add_block(n, pos[(p + 1, q, ti2, ti, j)][1],
                          pos[(p, q, si2, ti, None)][1], val)
        else:
            # Opaque -> Opaque: a bimodule endomorphism of the base algebra
            z = f.normalize(w @ s.gen)
            val = f.zeros(ring.dim)
            val[(np.arange(dA)) * dA + idem_d] = z
            add_block(n, pos[(p + 1, q, ti2, ti, None)][1],
                      pos[(p, q, si2, ti, None)][1], val)
    else:
        # right summand is the cyclic-unit bimodule: tensor unit
        add_block(n, pos[(p + 1, q, ti2, ti, None)][1],
                  pos[(p, q, si2, ti, None)][1], w)


def _tensor_right_block(ring, base, f, nv, dA, pos, add_block, n, p, q,
                        si, si2, ti2, xsum, s, t2, w):
    """Contribution of a right-factor block (s -> t2, value w, sign folded
    in) against the static left summand xsum."""
    if isinstance(xsum, Proj):
        a, b = _vsplit(base, xsum.vertex)
        idem_a = base.idem[a]
        if isinstance(s, Proj) and isinstance(t2, Proj):
            c, d = _vsplit(base, s.vertex)
            c2, d2 = _vsplit(base, t2.vertex)
            W = w.reshape(dA, dA)
            mids = base.peirce_indices(b, c)
            tmids = base.peirce_indices(b, c2)
            for mb in mids:
                T2 = base.mul[mb, :, :]          # T2[k, mc]
                M2 = f.normalize(np.tensordot(W, T2, axes=([0], [0])))  # [l, mc]
                for mc in tmids:
                    col = M2[:, mc]
                    if _is_zero(f, col):
                        continue
                    val = f.zeros(ring.dim)
                    val[idem_a * dA + np.arange(dA)] = col
                    add_block(n, pos[(p, q + 1, si, ti2, mc)][1],
                              pos[(p, q, si, si2, mb)][1], val)
        elif isinstance(s, Proj) and isinstance(t2, Opaque):
            c, d = _vsplit(base, s.vertex)
            z = w
            for mb in base.peirce_indices(b, c):
                mz = base.multiply(base.basis_vector(mb), z)
                if _is_zero(f, mz):
                    continue
                val = f.zeros(ring.dim)
                val[idem_a * dA + np.arange(dA)] = mz
                add_block(n, pos[(p, q + 1, si, ti2, None)][1],
                          pos[(p, q, si, si2, mb)][1], val)
        elif isinstance(s, Opaque) and isinstance(t2, Proj):
            # dense block out of the cyclic-unit summand: the image of the
            # unit generator determines the bimodule map
            z1 = f.normalize(w @ s.gen)
            c2, d2 = _vsplit(base, t2.vertex)
            idx_t = _idx(ring, t2.vertex)
            full = f.zeros(ring.dim)
            full[idx_t] = z1
            Z = full.reshape(dA, dA)
            for mc in base.peirce_indices(b, c2):
                row = Z[mc, :]
                if _is_zero(f, row):
                    continue
                val = f.zeros(ring.dim)
                val[idem_a * dA + np.arange(dA)] = row
                add_block(n, pos[(p, q + 1, si, ti2, mc)][1],
                          pos[(p, q, si, si2, None)][1], val)
        else:
            # Opaque -> Opaque: a bimodule endomorphism of the base algebra
            z1 = f.normalize(w @ s.gen)
            ez = f.normalize(base.lmul(base.idempotent_vector(b)) @ z1)
            if not _is_zero(f, ez):
                val = f.zeros(ring.dim)
                val[idem_a * dA + np.arange(dA)] = ez
                add_block(n, pos[(p, q + 1, si, ti2, None)][1],
                          pos[(p, q, si, si2, None)][1], val)
    else:
        # left summand is the cyclic-unit bimodule: tensor unit
        add_block(n, pos[(p, q + 1, si, ti2, None)][1],
                  pos[(p, q, si, si2, None)][1], w)


# ----------------------------------------------------------------------
# duals
# ----------------------------------------------------------------------

def dual_blocks(x: BlockComplex) -> BlockComplex:
    """Linear dual of a block complex over env(A, A) for symmetric A.

    Projective labels swap their two vertices, ring-element values swap
    their tensor factors, cyclic-unit summands are self-dual through the
    symmetrizing form, and d*^n = (−1)^{n+1} (d^{−n−1})*.
    """
    ring = x.ring
    base = _env_parts(ring)
    f = ring.field
    lam, G, Ginv = base.symmetric_structure()
    dA = base.dim

    def dual_summand(s: Summand) -> Summand:
        if isinstance(s, Proj):
            a, b = _vsplit(base, s.vertex)
            return Proj(_vjoin(base, b, a))
        return Opaque(s.module, s.label, s.base, s.gen)

    terms = {}
    for i, ts in x.terms.items():
        terms[-i] = [dual_summand(s) for s in ts]
    blocks: dict[int, dict[tuple[int, int], np.ndarray]] = {}
    for i, bs in x.blocks.items():
        n = -i - 1
        sign = f.scalar((-1) ** (n + 1))
        out = {}
        src = x.summands(i)
        tgt = x.summands(i + 1)
        for (ti, si), val in bs.items():
            s, t = src[si], tgt[ti]
            if isinstance(s, Proj) and isinstance(t, Proj):
                dval = f.normalize(sign * val.reshape(dA, dA).T.reshape(-1))
                out[(si, ti)] = dval
            elif isinstance(s, Proj) and isinstance(t, Opaque):
                # dual of x ↦ x·z : the opaque summand maps into the dual
                # projective; conjugate the transpose through the pairings
                dense = po_dense(ring, s, t.module, val)
                a, b = _vsplit(base, s.vertex)
                gram = _proj_pairing(ring, base, G, a, b)
                rhs = f.normalize(f.normalize(dense.T.copy() @ G.T.copy()))
                sol = la.solve(f, gram, rhs)
                if sol is None:
                    raise ComplexError("projective pairing failed to invert")
                out[(si, ti)] = f.normalize(sign * sol)
            elif isinstance(s, Opaque) and isinstance(t, Proj):
                # dual of a dense map A -> P(a2,b2): a map P(b2,a2) -> A,
                # conjugated through the projective pairing and the form
                B = val
                a2, b2 = _vsplit(base, t.vertex)
                gram = _proj_pairing(ring, base, G, a2, b2)
                D = f.normalize(la.invert(f, G.T.copy()) @
                                f.normalize(B.T.copy() @ gram))
                ps = Proj(_vjoin(base, b2, a2))
                out[(si, ti)] = f.normalize(sign * _as_po_value(
                    ring, ps, Opaque(s.module, s.label, s.base, s.gen), D))
            else:
                C = val
                D = f.normalize(la.invert(f, G.T.copy()) @
                                f.normalize(C.T.copy() @ G.T.copy()))
                out[(si, ti)] = f.normalize(sign * D)
        if out:
            blocks[n] = out
    return BlockComplex(ring, terms, blocks)


def _proj_pairing(ring: Algebra, base: Algebra, G: np.ndarray,
                  a: int, b: int) -> np.ndarray:
    """Gram matrix of the pairing P(a,b) × P(b,a) → k,
    ⟨u⊗t, x⊗y⟩ = λ(t x) λ(u y), in summand coordinates."""
    f = ring.field
    idx_ab = _idx(ring, _vjoin(base, a, b))
    idx_ba = _idx(ring, _vjoin(base, b, a))
    dA = base.dim
    rows = []
    for fl in idx_ab:
        i, j = fl // dA, fl % dA
        row = [f.normalize(G[j, k] * G[i, l])
               for (k, l) in ((g // dA, g % dA) for g in idx_ba)]
        rows.append(row)
    return f.normalize(np.array(rows, dtype=object)) if f.p == 0 else \
        f.normalize(np.array(rows, dtype=np.int64))


# ----------------------------------------------------------------------
# chain maps between block complexes; isomorphism search
# ----------------------------------------------------------------------

def _unknown_basis(ring: Algebra, s: Summand, t: Summand) -> list[np.ndarray]:
    """Basis blocks for the space of module maps summand s -> summand t."""
    f = ring.field
    if isinstance(s, Proj) and isinstance(t, Proj):
        out = []
        for k in ring.peirce_indices(s.vertex, t.vertex):
            out.append(ring.basis_vector(k))
        return out
    if isinstance(s, Proj):
        rows = la.row_space(f, t.module.rho(
            ring.idempotent_vector(s.vertex)).T.copy())
        return [rows[r].copy() for r in range(rows.shape[0])]
    if isinstance(t, Proj):
        return _cyclic_to_proj_basis(ring, s, t)
    return _cyclic_to_cyclic_basis(ring, s, t)


def _balance_kernel(ring: Algebra, base: Algebra, idx_t: list[int]) -> np.ndarray:
    """Columns y over R e_u with (a ⊗ 1)·y = (1 ⊗ a°)·y for all generators."""
    from .algebra import tensor_vec
    f = ring.field
    stacks = []
    for g in base.generators():
        left = ring.lmul(tensor_vec(f, g, base.unit))
        right = ring.lmul(tensor_vec(f, base.unit, g))
        stacks.append(f.normalize(left - right)[:, idx_t].copy())
    return la.kernel(f, np.concatenate(stacks, axis=0))


def _cyclic_to_proj_basis(ring: Algebra, s: Opaque, t: Proj) -> list[np.ndarray]:
    """Maps from a cyclic-unit summand into R e_u: solutions y with the two
    one-sided actions of the base agreeing on y."""
    from .algebra import tensor_vec
    f = ring.field
    if s.base is None or s.gen is None:
        raise ComplexError("opaque summand without cyclic presentation")
    base = s.base
    idx_t = _idx(ring, t.vertex)
    ker = _balance_kernel(ring, base, idx_t)
    out = []
    for c in range(ker.shape[1]):
        yfull = _pad(ring, ker[:, c].copy(), t.vertex)
        cols = []
        for k in range(base.dim):
            act = ring.lmul(tensor_vec(f, base.basis_vector(k), base.unit))
            cols.append(f.normalize(act @ yfull)[idx_t].copy())
        out.append(f.normalize(np.stack(cols, axis=1)))
    return out


def _cyclic_to_cyclic_basis(ring: Algebra, s: Opaque, t: Opaque) -> list[np.ndarray]:
    f = ring.field
    if s.base is None or s.gen is None:
        raise ComplexError("opaque summand without cyclic presentation")
    base = s.base
    zr = base.center_rows()
    out = []
    for r in range(zr.shape[0]):
        out.append(base.lmul(zr[r].copy()))
    return out


def _constraint_dim(ring: Algebra, s: Summand, t: Summand) -> int:
    if isinstance(s, Proj) and isinstance(t, Proj):
        return ring.dim
    if isinstance(s, Proj):
        return t.module.dim
    if isinstance(t, Proj):
        return len(_idx(ring, t.vertex)) * s.module.dim
    return t.module.dim * s.module.dim


def _flatten_value(val: np.ndarray) -> np.ndarray:
    return val.reshape(-1)


def block_chain_map_space(x: BlockComplex, y: BlockComplex) -> list[BlockChainMap]:
    """Basis of chain maps x -> y, found blockwise."""
    ring = x.ring
    f = x.field
    degrees = sorted(set(x.terms) | set(y.terms))
    # unknowns
    slots = []           # (degree, t_idx, s_idx, basis list)
    offsets = []
    total = 0
    for i in degrees:
        for ti, t in enumerate(y.summands(i)):
            for si, s in enumerate(x.summands(i)):
                basis = _unknown_basis(ring, s, t)
                if basis:
                    slots.append((i, ti, si, basis))
                    offsets.append(total)
                    total += len(basis)
    if total == 0:
        return []
    slot_at = {}
    for k, (i, ti, si, basis) in enumerate(slots):
        slot_at[(i, ti, si)] = (offsets[k], basis)
    # constraints
    rows = []
    for i in degrees:
        for si, s in enumerate(x.summands(i)):
            for tj, t2 in enumerate(y.summands(i + 1)):
                cdim = _constraint_dim(ring, s, t2)
                block_rows = f.zeros((cdim, total))
                wrote = False
                # F then d_y
                for ti, t in enumerate(y.summands(i)):
                    dyb = y.blocks.get(i, {}).get((tj, ti))
                    if dyb is None or (i, ti, si) not in slot_at:
                        continue
                    off, basis = slot_at[(i, ti, si)]
                    for k, bb in enumerate(basis):
                        val = compose_blocks(ring, s, y.summands(i)[ti], t2,
                                             bb, dyb)
                        block_rows[:, off + k] = f.normalize(
                            block_rows[:, off + k] + _flatten_value(val))
                        wrote = True
                # d_x then F (minus)
                for sj, s2 in enumerate(x.summands(i + 1)):
                    dxb = x.blocks.get(i, {}).get((sj, si))
                    if dxb is None or (i + 1, tj, sj) not in slot_at:
                        continue
                    off, basis = slot_at[(i + 1, tj, sj)]
                    for k, bb in enumerate(basis):
                        val = compose_blocks(ring, s, x.summands(i + 1)[sj],
                                             t2, dxb, bb)
                        block_rows[:, off + k] = f.normalize(
                            block_rows[:, off + k] - _flatten_value(val))
                        wrote = True
                if wrote:
                    rows.append(block_rows)
    if rows:
        ker = la.kernel(f, np.concatenate(rows, axis=0))
    else:
        ker = f.eye(total)
    out = []
    for c in range(ker.shape[1]):
        bm = BlockChainMap(x, y)
        for k, (i, ti, si, basis) in enumerate(slots):
            off = offsets[k]
            acc = None
            for kk, bb in enumerate(basis):
                coeff = ker[off + kk, c]
                if coeff == f.zero:
                    continue
                term = f.normalize(coeff * bb)
                acc = term if acc is None else f.normalize(acc + term)
            if acc is not None and not _is_zero(f, acc):
                bm.blocks.setdefault(i, {})[(ti, si)] = acc
        out.append(bm)
    return out


def _block_map_dense_mats(bcm: BlockChainMap) -> dict[int, np.ndarray]:
    f = bcm.source.field
    ring = bcm.source.ring
    xs, ys = bcm.source, bcm.target
    mats = {}
    for i in set(xs.terms) | set(ys.terms):
        src = xs.summands(i)
        tgt = ys.summands(i)
        sdims = [summand_dim(ring, s) for s in src]
        tdims = [summand_dim(ring, t) for t in tgt]
        soff = np.concatenate([[0], np.cumsum(sdims)]) if sdims else np.array([0])
        toff = np.concatenate([[0], np.cumsum(tdims)]) if tdims else np.array([0])
        m = f.zeros((int(toff[-1]), int(soff[-1])))
        for (ti, si), val in bcm.blocks.get(i, {}).items():
            dense = block_dense(ring, src[si], tgt[ti], val)
            m[toff[ti]:toff[ti] + tdims[ti],
              soff[si]:soff[si] + sdims[si]] = dense
        mats[i] = m
    return mats


def _block_map_invertible(bcm: BlockChainMap) -> bool:
    f = bcm.source.field
    for i, m in _block_map_dense_mats(bcm).items():
        if m.shape[0] != m.shape[1]:
            return False
        if m.shape[0] and not la.is_invertible(f, m):
            return False
    return True


def _combine_block_maps(f, x, y, coeffs, maps) -> BlockChainMap:
    bm = BlockChainMap(x, y)
    for cm, co in zip(maps, coeffs):
        if co == f.zero:
            continue
        for i, bs in cm.blocks.items():
            for key, val in bs.items():
                tgt = bm.blocks.setdefault(i, {})
                term = f.normalize(co * val)
                if key in tgt:
                    tgt[key] = f.normalize(tgt[key] + term)
                else:
                    tgt[key] = term
    return bm


def block_iso_search(x: BlockComplex, y: BlockComplex, seed: int = 0,
                     budget: int = 200,
                     exhaustive_limit: int = 4096) -> IsoResult:
    """Isomorphism of block complexes (chain maps, no homotopies)."""
    f = x.field
    for i in set(x.terms) | set(y.terms):
        if x.dim(i) != y.dim(i):
            return IsoResult(IsoKind.NO, obstruction=(
                f"degree {i}: dim {x.dim(i)} != {y.dim(i)}"))
    if not x.terms and not y.terms:
        return IsoResult(IsoKind.ISO)
    maps = block_chain_map_space(x, y)
    if not maps:
        return IsoResult(IsoKind.NO, obstruction="no chain maps at all")
    for cm in maps:
        if _block_map_invertible(cm):
            return IsoResult(IsoKind.ISO, witness=cm)
    for a in range(len(maps)):
        for b in range(a + 1, len(maps)):
            cand = _combine_block_maps(f, x, y, [f.one, f.one],
                                       [maps[a], maps[b]])
            if _block_map_invertible(cand):
                return IsoResult(IsoKind.ISO, witness=cand)
    h = len(maps)
    if f.p > 0 and f.p ** h <= exhaustive_limit:
        import itertools
        for coeffs in itertools.product(range(f.p), repeat=h):
            cand = _combine_block_maps(f, x, y,
                                       [f.scalar(c) for c in coeffs], maps)
            if _block_map_invertible(cand):
                return IsoResult(IsoKind.ISO, witness=cand)
        return IsoResult(IsoKind.NO,
                         obstruction="exhaustive chain-map search failed")
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(budget):
        coeffs = list(f.rand(rng, h))
        cand = _combine_block_maps(f, x, y, coeffs, maps)
        if _block_map_invertible(cand):
            return IsoResult(IsoKind.ISO, witness=cand)
    return IsoResult(IsoKind.UNDETERMINED,
                     obstruction=f"no invertible chain map in {budget} tries")


def homotopy_equivalent_blocks(x: BlockComplex, y: BlockComplex,
                               seed: int = 0, budget: int = 200,
                               max_steps: Optional[int] = None) -> IsoResult:
    """Minimize both complexes, then look for an isomorphism.  For
    complexes with indecomposable summands and no invertible differential
    components, homotopy equivalence is the same as isomorphism."""
    xm = minimize_blocks(x, max_steps=max_steps)
    ym = minimize_blocks(y, max_steps=max_steps)
    for i in set(xm.terms) | set(ym.terms):
        if xm.labels(i) != ym.labels(i):
            return IsoResult(IsoKind.NO, obstruction=(
                f"degree {i}: summands {xm.labels(i)} != {ym.labels(i)}"))
    return block_iso_search(xm, ym, seed=seed, budget=budget)


def homotopy_equivalent_dense(c1: Complex, c2: Complex, seed: int = 0,
                              budget: int = 200,
                              max_steps: Optional[int] = None) -> IsoResult:
    """Dense-complex wrapper: label the terms, minimize, compare."""
    return homotopy_equivalent_blocks(dense_to_blocks(c1), dense_to_blocks(c2),
                                      seed=seed, budget=budget,
                                      max_steps=max_steps)

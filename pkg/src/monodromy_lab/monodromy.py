"""Weight filtrations of nilpotent operators, absolute and relative.

``centered_weight_filtration`` is the kernel/image formula for the filtration
of a nilpotent operator centered at a given weight.  ``rmf`` computes the
relative version with respect to an arbitrary finite increasing filtration by
peeling the top weight, lifting Jordan chains of the top graded piece, and
solving the exact linear systems that keep the lifts compatible; the result is
always re-checked against both defining axioms by ``verify_rmf``, which is the
universal oracle everything else in the library trusts.
"""

from __future__ import annotations

from .errors import InternalInconsistency, NotNilpotentError, PreconditionViolated
from .filtration import Filtration
from .linalg import Mat, Subquotient, Subspace, induced_map, solve


def centered_weight_filtration(n_op: Mat, center: int) -> Filtration:
    """Unique filtration M with N M_w ⊆ M_{w-2} and N^r: gr_{c+r} ≅ gr_{c-r}.

    M_{center+k} = Σ_{i-j=k, i,j≥0} (ker N^{i+1} ∩ im N^j).
    """
    if n_op.rows != n_op.cols:
        raise PreconditionViolated("operator must be square")
    if not n_op.is_nilpotent():
        raise NotNilpotentError("operator is not nilpotent")
    field = n_op.field
    dim = n_op.rows
    if dim == 0:
        return Filtration(field, 0, [])
    from .linalg import image, kernel

    powers = [Mat.identity(field, dim)]
    for _ in range(dim):
        powers.append(powers[-1] * n_op)
    kers = [kernel(p) for p in powers]
    ims = [image(p) for p in powers]
    steps = []
    for k in range(-dim, dim + 1):
        acc = Subspace.zero(field, dim)
        for j in range(0, dim + 1):
            i = k + j
            if 0 <= i <= dim:
                acc = acc.add(kers[min(i + 1, dim)].intersect(ims[min(j, dim)]))
        steps.append((center + k, acc))
    filt = Filtration(field, dim, steps)
    if not verify_rmf(Filtration.pure(field, dim, center), n_op, filt):
        raise InternalInconsistency("centered weight filtration failed its axioms")
    return filt


def verify_rmf(w_filt: Filtration, n_op: Mat, m_filt: Filtration) -> bool:
    """Exact check of both axioms of the relative monodromy filtration.

    (i)  N M_w ⊆ M_{w-2} for every w;
    (ii) N^r induces an isomorphism gr^M_{w+r} gr^W_w → gr^M_{w-r} gr^W_w.
    """
    field = n_op.field
    dim = n_op.rows
    if w_filt.ambient != dim or m_filt.ambient != dim:
        return False
    if dim == 0:
        return True
    if not n_op.is_nilpotent():
        return False
    for w, s in w_filt.steps:
        for v in s.basis:
            if not s.contains(n_op.apply(v)):
                return False
    for w, s in m_filt.steps:
        target = m_filt.at(w - 2)
        for v in s.basis:
            if not target.contains(n_op.apply(v)):
                return False
    for w in w_filt.jumps():
        piece = w_filt.gr(w)
        if piece.dim == 0:
            continue
        n_bar = piece.induced_operator(n_op)
        m_bar = m_filt.restrict_to(piece)
        span = max(abs(j - w) for j in m_bar.jumps()) if m_bar.jumps() else 0
        for r in range(0, span + 1):
            upper = m_bar.gr(w + r)
            lower = m_bar.gr(w - r)
            if upper.dim != lower.dim:
                return False
            if upper.dim == 0:
                continue
            mat = induced_map(n_bar ** r, upper, lower)
            from .linalg import kernel as _ker

            if _ker(mat).dim != 0:
                return False
    return True


def _jordan_chains(n_op: Mat):
    """Jordan chains of a nilpotent operator: list of (top vector, length)."""
    field = n_op.field
    dim = n_op.rows
    from .linalg import kernel

    powers = [Mat.identity(field, dim)]
    while not powers[-1].is_zero() or len(powers) == 1:
        powers.append(powers[-1] * n_op)
        if len(powers) > dim + 1:
            break
    kers = [Subspace.zero(field, dim)] + [kernel(p) for p in powers[1:]]
    depth = len(kers) - 1
    chains = []
    for k in range(depth, 0, -1):
        # tops of length-k chains: ker N^k modulo ker N^{k-1} + N(ker N^{k+1})
        lower = kers[k - 1]
        nk1 = kers[min(k + 1, depth)]
        pushed = Subspace(field, dim, [n_op.apply(v) for v in nk1.basis])
        mod_space = lower.add(pushed)
        for v in kers[k].basis:
            red = mod_space.reduce(v)
            if any(x != 0 for x in red):
                chains.append((red, k))
                mod_space = mod_space.add(Subspace(field, dim, [red]))
    return chains


def rmf(w_filt: Filtration, n_op: Mat) -> Filtration | None:
    """Relative monodromy filtration of N with respect to W, or None.

    Constructed by induction on the number of W-jumps; every candidate is
    accepted only after verify_rmf.  None means no filtration can satisfy the
    axioms (the lifting systems are exactly the obstruction).
    """
    field = n_op.field
    dim = n_op.rows
    if n_op.cols != dim or w_filt.ambient != dim:
        raise PreconditionViolated("dimension mismatch between W and N")
    if not n_op.is_nilpotent():
        raise PreconditionViolated("operator is not nilpotent")
    for w, s in w_filt.steps:
        for v in s.basis:
            if not s.contains(n_op.apply(v)):
                raise PreconditionViolated("operator does not preserve W")
    result = _rmf_inner(w_filt, n_op)
    if result is None:
        return None
    if not verify_rmf(w_filt, n_op, result):
        raise InternalInconsistency("constructed relative filtration failed verification")
    return result


def _rmf_inner(w_filt: Filtration, n_op: Mat) -> Filtration | None:
    field = n_op.field
    dim = n_op.rows
    if dim == 0:
        return Filtration(field, 0, [])
    jumps = w_filt.jumps()
    if len(jumps) == 1:
        return centered_weight_filtration(n_op, jumps[0])
    top = jumps[-1]
    below = w_filt.at(top - 1)
    sub = Subquotient.of_subspace(below)
    w_below = w_filt.restrict_to(sub)
    n_below = sub.induced_operator(n_op)
    m_below = _rmf_inner(w_below, n_below)
    if m_below is None:
        return None
    if not verify_rmf(w_below, n_below, m_below):
        return None
    # ambient versions of the recursive steps
    m_prev_steps = [
        (w, Subspace(field, dim, [sub.lift(v) for v in s.basis]))
        for w, s in m_below.steps
    ]

    def m_prev_at(w):
        out = Subspace.zero(field, dim)
        for jw, s in m_prev_steps:
            if jw <= w:
                out = s
        return out

    quot = Subquotient(Subspace.full(field, dim), below)
    n_bar = quot.induced_operator(n_op)
    chains = _jordan_chains(n_bar)
    string_elements: list = []
    for top_bar, length in chains:
        r = length - 1
        v0 = quot.lift(top_bar)
        target_space = m_prev_at(top - r - 2)
        # solve N^{r+1} (v0 + u) ∈ M'_{top-r-2} with u in `below`
        power = n_op ** (r + 1)
        rhs = [-x for x in power.apply(v0)]
        cols = [power.apply(u) for u in below.basis] + [list(b) for b in target_space.basis]
        if cols:
            mat = Mat(field, list(zip(*cols)))
            sol = solve(mat, rhs)
        else:
            sol = () if all(x == 0 for x in rhs) else None
        if sol is None:
            return None
        u_vec = [field.zero] * dim
        for c, b in zip(sol[: below.dim], below.basis):
            u_vec = [a + c * x for a, x in zip(u_vec, b)]
        start = tuple(a + b for a, b in zip(v0, u_vec))
        cur = start
        for i in range(length):
            string_elements.append((top + r - 2 * i, cur))
            cur = n_op.apply(cur)
    weights = sorted({w for w, _ in m_prev_steps} | {w for w, _ in string_elements} | {top})
    steps = []
    for w in weights:
        vecs = list(m_prev_at(w).basis) + [v for lw, v in string_elements if lw <= w]
        steps.append((w, Subspace(field, dim, vecs)))
    try:
        return Filtration(field, dim, steps)
    except PreconditionViolated:
        return None

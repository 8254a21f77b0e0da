"""Sparse graded exterior objects over a chart.

``Form`` and ``MultiVector`` store nonzero coefficients on strictly
increasing multi-indices; ``MvForm`` is a multivector-valued form keyed by
pairs of multi-indices.  No 1/a! factors appear anywhere: summation over
ordered multi-indices is the storage convention.

Sign conventions (pinned once, in multiindex.py):

* wedge sign comes from sorting concatenated index blocks;
* contraction by a decomposable multivector applies the factors left to
  right (iota_{u ^ v} = iota_v o iota_u), and symmetrically for the
  contraction of a multivector by a form;
* iota_{theta (x) u} gamma = theta ^ iota_u gamma for multivector valued
  forms, and iota_X in the form slot only is ``contract_form_slot``.
"""

from __future__ import annotations

from . import scalars
from .errors import DegreeError
from .multiindex import contract_index, merge, subsets
from .scalars import as_scalar

__all__ = [
    "Form",
    "MultiVector",
    "MvForm",
    "wedge",
    "contract",
    "contract_form",
    "contract_form_slot",
    "identity_tensor",
    "volume_contraction",
    "volume_mv_contraction",
]


def _clean(data):
    out = {}
    for key, val in data.items():
        val = scalars.normalized(val)
        if val != 0:
            out[key] = val
    return out


class _Graded:
    """Shared container behaviour of Form and MultiVector."""

    __slots__ = ("chart", "degree", "data")

    def __init__(self, chart, degree, data=None, _normalized=False):
        if degree < 0 or degree > chart.m:
            raise DegreeError(f"degree {degree} out of range on {chart}")
        self.chart = chart
        self.degree = degree
        data = data or {}
        if not _normalized:
            data = {k: as_scalar(v) for k, v in data.items()}
            for key in data:
                if len(key) != degree or any(
                    i < 0 or i >= chart.m for i in key
                ) or list(key) != sorted(set(key)):
                    raise DegreeError(f"bad multi-index {key} for degree {degree}")
            data = _clean(data)
        self.data = data

    @classmethod
    def zero(cls, chart, degree):
        return cls(chart, degree, {}, _normalized=True)

    def is_zero(self):
        return not self.data

    def __bool__(self):
        return bool(self.data)

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.chart == other.chart
            and self.degree == other.degree
            and self.data == other.data
        )

    def __hash__(self):
        return hash((type(self).__name__, self.degree, frozenset(self.data.items())))

    def __add__(self, other):
        self._check_like(other)
        data = dict(self.data)
        for key, val in other.data.items():
            acc = scalars.sadd(data.get(key, scalars.ZERO), val)
            if acc == 0:
                data.pop(key, None)
            else:
                data[key] = acc
        return type(self)(self.chart, self.degree, data, _normalized=True)

    def __neg__(self):
        return type(self)(
            self.chart,
            self.degree,
            {k: scalars.sneg(v) for k, v in self.data.items()},
            _normalized=True,
        )

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        if isinstance(scalar, _Graded):
            if scalar.degree == 0:
                scalar = scalar.data.get((), scalars.ZERO)
            elif self.degree == 0:
                return scalar.__rmul__(self.data.get((), scalars.ZERO))
            else:
                raise DegreeError("use wedge for products of graded objects")
        scalar = as_scalar(scalar)
        if scalar == 0:
            return type(self).zero(self.chart, self.degree)
        return type(self)(
            self.chart,
            self.degree,
            _clean({k: scalars.smul(scalar, v) for k, v in self.data.items()}),
            _normalized=True,
        )

    def __mul__(self, scalar):
        return self.__rmul__(scalar)

    def __truediv__(self, scalar):
        return self.__rmul__(scalars.sdiv(scalars.ONE, as_scalar(scalar)))

    def _check_like(self, other):
        if type(self) is not type(other) or self.chart != other.chart:
            raise DegreeError(f"cannot combine {self!r} and {other!r}")
        if self.degree != other.degree:
            raise DegreeError(
                f"degree mismatch: {self.degree} vs {other.degree}"
            )

    def __xor__(self, other):
        return wedge(self, other)

    def free_symbols(self):
        out = set()
        for val in self.data.values():
            out |= val.free_symbols
        return out

    def map_scalars(self, fn):
        return type(self)(
            self.chart, self.degree, _clean({k: fn(v) for k, v in self.data.items()}),
            _normalized=True,
        )

    def _fiber_count(self, idx):
        n = self.chart.n
        return sum(1 for i in idx if i >= n)


class Form(_Graded):
    """A differential form of fixed degree; degree 0 wraps a bare scalar."""

    @classmethod
    def scalar_form(cls, chart, value):
        value = as_scalar(value)
        data = {(): value} if value != 0 else {}
        return cls(chart, 0, data, _normalized=True)

    @classmethod
    def d_coord(cls, chart, name):
        return cls(chart, 1, {(chart.index(name),): scalars.ONE}, _normalized=True)

    def scalar(self):
        if self.degree != 0:
            raise DegreeError("scalar() needs a 0-form")
        return self.data.get((), scalars.ZERO)

    def is_semibasic(self):
        return all(self._fiber_count(idx) == 0 for idx in self.data)

    def is_horizontal(self, r):
        """(r)-horizontal: killed by any degree+1-r vertical vectors."""
        return all(self._fiber_count(idx) <= self.degree - r for idx in self.data)

    def coefficient(self, idx):
        return self.data.get(tuple(idx), scalars.ZERO)

    def __repr__(self):
        from .render import render_form

        return render_form(self)


class MultiVector(_Graded):
    """A multivector field of fixed degree."""

    @classmethod
    def coord_vector(cls, chart, name):
        return cls(chart, 1, {(chart.index(name),): scalars.ONE}, _normalized=True)

    def is_vertical(self):
        """Every component contains at least one fiber direction."""
        n = self.chart.n
        return all(any(i >= n for i in idx) for idx in self.data)

    def coefficient(self, idx):
        return self.data.get(tuple(idx), scalars.ZERO)

    def __repr__(self):
        from .render import render_mv

        return render_mv(self)


class MvForm:
    """Multivector valued form: sparse map (form index, vector index) -> scalar."""

    __slots__ = ("chart", "form_degree", "vec_degree", "data")

    def __init__(self, chart, form_degree, vec_degree, data=None, _normalized=False):
        if form_degree < 0 or form_degree > chart.m:
            raise DegreeError(f"form degree {form_degree} out of range")
        if vec_degree < 0 or vec_degree > chart.m:
            raise DegreeError(f"vector degree {vec_degree} out of range")
        self.chart = chart
        self.form_degree = form_degree
        self.vec_degree = vec_degree
        data = data or {}
        if not _normalized:
            data = _clean({(tuple(f), tuple(v)): as_scalar(c) for (f, v), c in data.items()})
            for fidx, vidx in data:
                if len(fidx) != form_degree or len(vidx) != vec_degree:
                    raise DegreeError(f"bad key {(fidx, vidx)}")
        self.data = data

    @classmethod
    def zero(cls, chart, form_degree, vec_degree):
        return cls(chart, form_degree, vec_degree, {}, _normalized=True)

    @classmethod
    def tensor(cls, form, mv):
        """theta (x) u for a Form and a MultiVector."""
        data = {}
        for fidx, c in form.data.items():
            for vidx, u in mv.data.items():
                acc = scalars.sadd(
                    data.get((fidx, vidx), scalars.ZERO), scalars.smul(c, u)
                )
                data[(fidx, vidx)] = acc
        return cls(form.chart, form.degree, mv.degree, _clean(data), _normalized=True)

    def is_zero(self):
        return not self.data

    def __bool__(self):
        return bool(self.data)

    def __eq__(self, other):
        return (
            isinstance(other, MvForm)
            and self.chart == other.chart
            and self.form_degree == other.form_degree
            and self.vec_degree == other.vec_degree
            and self.data == other.data
        )

    def __hash__(self):
        return hash(("MvForm", self.form_degree, self.vec_degree,
                      frozenset(self.data.items())))

    def __add__(self, other):
        if (
            not isinstance(other, MvForm)
            or other.form_degree != self.form_degree
            or other.vec_degree != self.vec_degree
        ):
            raise DegreeError("MvForm addition needs matching bidegrees")
        data = dict(self.data)
        for key, val in other.data.items():
            acc = scalars.sadd(data.get(key, scalars.ZERO), val)
            if acc == 0:
                data.pop(key, None)
            else:
                data[key] = acc
        return MvForm(self.chart, self.form_degree, self.vec_degree, data,
                      _normalized=True)

    def __neg__(self):
        return MvForm(
            self.chart,
            self.form_degree,
            self.vec_degree,
            {k: scalars.sneg(v) for k, v in self.data.items()},
            _normalized=True,
        )

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        scalar = as_scalar(scalar)
        return MvForm(
            self.chart,
            self.form_degree,
            self.vec_degree,
            _clean({k: scalars.smul(scalar, v) for k, v in self.data.items()}),
            _normalized=True,
        )

    __mul__ = __rmul__

    def form_slot_semibasic(self):
        n = self.chart.n
        return all(all(i < n for i in fidx) for fidx, _ in self.data)

    def vec_slot_vertical(self):
        n = self.chart.n
        return all(any(i >= n for i in vidx) for _, vidx in self.data)

    def terms(self):
        """Iterate (form index, vector index, coefficient)."""
        for (fidx, vidx), c in self.data.items():
            yield fidx, vidx, c

    def __repr__(self):
        from .render import render_mvform

        return render_mvform(self)


# ---------------------------------------------------------------------------
# products and contractions
# ---------------------------------------------------------------------------


def _wedge_same(x, y, cls):
    degree = x.degree + y.degree
    if degree > x.chart.m:
        raise DegreeError(
            f"wedge degree {degree} exceeds chart dimension {x.chart.m}"
        )
    data = {}
    for ia, ca in x.data.items():
        for ib, cb in y.data.items():
            sign, idx = merge(ia, ib)
            if sign == 0:
                continue
            term = scalars.smul(ca, cb)
            if sign < 0:
                term = scalars.sneg(term)
            acc = scalars.sadd(data.get(idx, scalars.ZERO), term)
            if acc == 0:
                data.pop(idx, None)
            else:
                data[idx] = acc
    return cls(x.chart, degree, data, _normalized=True)


def wedge(x, y):
    """Exterior product.

    Form ^ Form and MultiVector ^ MultiVector are the graded-commutative
    products.  An MvForm wedges a MultiVector on the vector slot only,
    (theta (x) v) ^ u = theta (x) (v ^ u); two MvForms multiply slotwise.
    Scalars multiply through.
    """
    if not isinstance(x, (Form, MultiVector, MvForm)):
        return wedge(y, x) if isinstance(y, (Form, MultiVector, MvForm)) else x * y
    if not isinstance(y, (Form, MultiVector, MvForm)):
        return x * y
    if x.chart != y.chart:
        raise DegreeError("wedge of objects on different charts")
    if isinstance(x, Form) and isinstance(y, Form):
        return _wedge_same(x, y, Form)
    if isinstance(x, MultiVector) and isinstance(y, MultiVector):
        return _wedge_same(x, y, MultiVector)
    if isinstance(x, MvForm) and isinstance(y, MultiVector):
        return _mvform_wedge_mv(x, y, left=False)
    if isinstance(x, MultiVector) and isinstance(y, MvForm):
        return _mvform_wedge_mv(y, x, left=True)
    if isinstance(x, MvForm) and isinstance(y, MvForm):
        return _mvform_wedge_mvform(x, y)
    if isinstance(x, Form) and isinstance(y, MvForm):
        return _mvform_wedge_form(y, x, left=True)
    if isinstance(x, MvForm) and isinstance(y, Form):
        return _mvform_wedge_form(x, y, left=False)
    raise DegreeError(f"cannot wedge {type(x).__name__} with {type(y).__name__}")


def _mvform_wedge_mv(w, u, left):
    """(theta (x) v) ^ u = theta (x) (v ^ u); u ^ (theta (x) v) = theta (x) (u ^ v)."""
    vec_degree = w.vec_degree + u.degree
    if vec_degree > w.chart.m:
        raise DegreeError("vector degree overflow")
    data = {}
    for (fidx, vidx), c in w.data.items():
        for uidx, cu in u.data.items():
            if left:
                sign, idx = merge(uidx, vidx)
            else:
                sign, idx = merge(vidx, uidx)
            if sign == 0:
                continue
            term = scalars.smul(c, cu)
            if sign < 0:
                term = scalars.sneg(term)
            key = (fidx, idx)
            acc = scalars.sadd(data.get(key, scalars.ZERO), term)
            if acc == 0:
                data.pop(key, None)
            else:
                data[key] = acc
    return MvForm(w.chart, w.form_degree, vec_degree, data, _normalized=True)


def _mvform_wedge_mvform(a, b):
    """Slotwise product (theta (x) v) ^ (omega (x) u) = (theta^omega) (x) (v^u)."""
    fd = a.form_degree + b.form_degree
    vd = a.vec_degree + b.vec_degree
    if fd > a.chart.m or vd > a.chart.m:
        raise DegreeError("MvForm wedge overflow")
    data = {}
    for (fa, va), ca in a.data.items():
        for (fb, vb), cb in b.data.items():
            fs, fidx = merge(fa, fb)
            if fs == 0:
                continue
            vs, vidx = merge(va, vb)
            if vs == 0:
                continue
            term = scalars.smul(ca, cb)
            if fs * vs < 0:
                term = scalars.sneg(term)
            key = (fidx, vidx)
            acc = scalars.sadd(data.get(key, scalars.ZERO), term)
            if acc == 0:
                data.pop(key, None)
            else:
                data[key] = acc
    return MvForm(a.chart, fd, vd, data, _normalized=True)


def _mvform_wedge_form(w, form, left):
    fd = w.form_degree + form.degree
    if fd > w.chart.m:
        raise DegreeError("MvForm form-slot overflow")
    data = {}
    for (fidx, vidx), c in w.data.items():
        for gidx, cg in form.data.items():
            if left:
                sign, idx = merge(gidx, fidx)
            else:
                sign, idx = merge(fidx, gidx)
            if sign == 0:
                continue
            term = scalars.smul(c, cg)
            if sign < 0:
                term = scalars.sneg(term)
            key = (idx, vidx)
            acc = scalars.sadd(data.get(key, scalars.ZERO), term)
            if acc == 0:
                data.pop(key, None)
            else:
                data[key] = acc
    return MvForm(w.chart, fd, w.vec_degree, data, _normalized=True)


def contract(u, alpha):
    """Interior product iota_u alpha.

    ``u`` is a MultiVector or MvForm, ``alpha`` a Form.  For plain
    multivectors this is the iterated interior product with
    iota_{u ^ v} = iota_v o iota_u; for multivector valued forms it is
    iota_{theta (x) v} alpha = theta ^ iota_v alpha, extended bilinearly.
    """
    if isinstance(u, MvForm):
        if u.vec_degree > alpha.degree:
            raise DegreeError(
                f"cannot contract degree {alpha.degree} form by {u.vec_degree}-vector values"
            )
        out = Form.zero(alpha.chart, u.form_degree + alpha.degree - u.vec_degree)
        for fidx, vidx, c in u.terms():
            theta = Form(alpha.chart, u.form_degree, {fidx: c}, _normalized=True)
            inner = contract(
                MultiVector(alpha.chart, u.vec_degree, {vidx: scalars.ONE},
                            _normalized=True),
                alpha,
            )
            out = out + wedge(theta, inner)
        return out
    if not isinstance(u, MultiVector) or not isinstance(alpha, Form):
        raise DegreeError("contract(u, alpha) needs a multivector and a form")
    if u.chart != alpha.chart:
        raise DegreeError("contraction across charts")
    if u.degree > alpha.degree:
        raise DegreeError(
            f"cannot contract a degree {alpha.degree} form by a {u.degree}-vector"
        )
    data = {}
    for vidx, cu in u.data.items():
        for fidx, ca in alpha.data.items():
            sign, rest = contract_index(fidx, vidx)
            if sign == 0:
                continue
            term = scalars.smul(cu, ca)
            if sign < 0:
                term = scalars.sneg(term)
            acc = scalars.sadd(data.get(rest, scalars.ZERO), term)
            if acc == 0:
                data.pop(rest, None)
            else:
                data[rest] = acc
    return Form(alpha.chart, alpha.degree - u.degree, data, _normalized=True)


def contract_form(alpha, u):
    """Contraction of a multivector by a form, iota_alpha u.

    Mirror of ``contract``: iota_{a ^ b} = iota_b o iota_a on forms acting
    on multivectors, with <dx^i, d/dx^j> = delta^i_j.
    """
    if not isinstance(alpha, Form) or not isinstance(u, MultiVector):
        raise DegreeError("contract_form(alpha, u) needs a form and a multivector")
    if alpha.degree > u.degree:
        raise DegreeError(
            f"cannot contract a {u.degree}-vector by a degree {alpha.degree} form"
        )
    data = {}
    for fidx, ca in alpha.data.items():
        for vidx, cu in u.data.items():
            sign, rest = contract_index(vidx, fidx)
            if sign == 0:
                continue
            term = scalars.smul(ca, cu)
            if sign < 0:
                term = scalars.sneg(term)
            acc = scalars.sadd(data.get(rest, scalars.ZERO), term)
            if acc == 0:
                data.pop(rest, None)
            else:
                data[rest] = acc
    return MultiVector(u.chart, u.degree - alpha.degree, data, _normalized=True)


def contract_form_slot(x, w):
    """iota_X (theta (x) u) = (iota_X theta) (x) u for a vector field X."""
    if not isinstance(x, MultiVector) or not isinstance(w, MvForm):
        raise DegreeError("contract_form_slot needs a multivector and an MvForm")
    if x.degree > w.form_degree:
        raise DegreeError("form slot degree too small")
    data = {}
    for (fidx, vidx), c in w.data.items():
        for xidx, cx in x.data.items():
            sign, rest = contract_index(fidx, xidx)
            if sign == 0:
                continue
            term = scalars.smul(cx, c)
            if sign < 0:
                term = scalars.sneg(term)
            key = (rest, vidx)
            acc = scalars.sadd(data.get(key, scalars.ZERO), term)
            if acc == 0:
                data.pop(key, None)
            else:
                data[key] = acc
    return MvForm(w.chart, w.form_degree - x.degree, w.vec_degree, data,
                  _normalized=True)


def identity_tensor(chart, a):
    """The identity 1_a = sum over ordered multi-indices dx^I (x) d/dx^I."""
    if a < 0 or a > chart.m:
        raise DegreeError(f"identity tensor degree {a} out of range")
    data = {}
    for idx in subsets(tuple(range(chart.m)), a):
        data[(idx, idx)] = scalars.ONE
    return MvForm(chart, a, a, data, _normalized=True)


def volume_contraction(chart, lower):
    """d^{n-|lower|} x_{lower}: the listed base vectors contracted into d^n x."""
    n = chart.n
    vol = Form(chart, n, {tuple(range(n)): scalars.ONE}, _normalized=True)
    if not lower:
        return vol
    u = MultiVector(chart, 1, {(chart.index(lower[0]) if isinstance(lower[0], str) else lower[0],): scalars.ONE}, _normalized=True)
    for c in lower[1:]:
        i = chart.index(c) if isinstance(c, str) else c
        u = wedge(u, MultiVector(chart, 1, {(i,): scalars.ONE}, _normalized=True))
    return contract(u, vol)


def volume_mv_contraction(chart, lower):
    """The multivector mirror of ``volume_contraction``: the listed base
    differentials contracted into the base volume multivector."""
    n = chart.n
    vol = MultiVector(chart, n, {tuple(range(n)): scalars.ONE}, _normalized=True)
    if not lower:
        return vol
    alpha = Form.d_coord(chart, lower[0]) if isinstance(lower[0], str) else Form(
        chart, 1, {(lower[0],): scalars.ONE}, _normalized=True)
    for c in lower[1:]:
        nxt = Form.d_coord(chart, c) if isinstance(c, str) else Form(
            chart, 1, {(c,): scalars.ONE}, _normalized=True)
        alpha = wedge(alpha, nxt)
    return contract_form(alpha, vol)

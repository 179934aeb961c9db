"""Momentum-space Pauli spectrum of the Ising ground state.

In each ``(k, -k)`` channel only six of the sixteen two-qubit Pauli strings
have a nonzero expectation value, with magnitudes ``1, |cos theta|,
|sin theta|`` (each twice). A global string magnitude is a product of one
channel magnitude per channel, so the nonzero part of the spectrum is the
distribution of ``x = prod_k s_k`` with ``s_k`` uniform over the three channel
values. Most of this module works with ``ell = -ln x``, which turns products
into sums.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .errors import BinningError, InsufficientDataError, SizeGuardError
from .model import channel_amplitudes, check_size

ZERO_TOL = 1e-14
UNIT_TOL = 1e-12
DEFAULT_DELTA = 1e-3
SAMPLE_BLOCK = 8192
MAX_HIST_BINS = 50_000_000
DEFAULT_X_BINS = 100


@dataclass(frozen=True)
class ChannelPauliTable:
    """Nonzero channel magnitudes, shape ``(n_channels, 3)``: ``1, |cos|, |sin|``.

    Every listed value is carried by two strings; the other ten of the
    sixteen channel strings vanish.
    """

    values: np.ndarray
    multiplicity: int = 2
    zero_multiplicity: int = 10

    def __len__(self):
        return len(self.values)

    def log_atoms(self):
        """``-ln`` of the table, with ``inf`` for zeros and exact ``0`` for units."""
        with np.errstate(divide="ignore"):
            ell = -np.log(self.values)
        ell[self.values == 0.0] = np.inf
        ell[np.abs(self.values - 1.0) <= UNIT_TOL] = 0.0
        return ell


def channel_table(amps):
    vals = np.column_stack([np.ones(len(amps)), amps.abs_cos, amps.abs_sin])
    vals[vals < ZERO_TOL] = 0.0
    return ChannelPauliTable(vals)


def params_table(params):
    return channel_table(channel_amplitudes(params))


@dataclass(frozen=True)
class StringCounts:
    total: int
    nonzero: int
    unit: int
    zero: int


def string_counts(N):
    """Exact counts of all, nonzero, unit and zero Pauli strings."""
    N = check_size(N)
    half = N // 2
    total = 4**N
    nonzero = 6**half
    return StringCounts(total=total, nonzero=nonzero, unit=2**half, zero=total - nonzero)


@dataclass(frozen=True)
class SpectrumEnumeration:
    """All ``3^(N/2)`` distinct channel products; each stands for ``multiplicity`` strings."""

    values: np.ndarray
    multiplicity: int


def enumerate_spectrum(params, max_n=30):
    N = params.N
    if N > max_n:
        raise SizeGuardError(f"enumeration of 3^{N // 2} products exceeds cap N <= {max_n}")
    table = params_table(params).values
    out = np.ones(1)
    for row in table:
        out = np.multiply.outer(out, row).ravel()
    return SpectrumEnumeration(out, 2 ** (N // 2))


# ---------------------------------------------------------------------------
# histograms in ell = -ln x


def default_l_max(N):
    return 40.0 * math.sqrt(N)


@dataclass
class PauliHistogram:
    """Distribution of ``ell = -ln x`` over uniform bins ``[i delta, (i+1) delta)``.

    Exact zeros and exact units are kept outside the bins, as is the mass
    beyond ``l_max`` (``overflow``). In ``"nonzero"`` normalization the
    ``3^(N/2)`` channel products are equally weighted; in ``"full"`` the
    weights refer to all ``4^N`` strings.
    """

    N: int
    delta: float
    weights: np.ndarray
    overflow: float = 0.0
    zero_weight: float = 0.0
    unit_weight: float = 0.0
    normalization: str = "nonzero"
    meta: dict = field(default_factory=dict)

    @property
    def n_bins(self):
        return len(self.weights)

    @property
    def l_max(self):
        return self.n_bins * self.delta

    @property
    def edges(self):
        return np.arange(self.n_bins + 1) * self.delta

    @property
    def centers(self):
        return (np.arange(self.n_bins) + 0.5) * self.delta

    def total_mass(self):
        return float(self.weights.sum() + self.overflow + self.zero_weight + self.unit_weight)

    def regular_mass(self):
        return float(self.weights.sum() + self.overflow)

    def to_full(self):
        """Re-express weights as fractions of all ``4^N`` strings."""
        if self.normalization == "full":
            return self
        frac = 0.375 ** (self.N // 2)
        return replace(
            self,
            weights=self.weights * frac,
            overflow=self.overflow * frac,
            unit_weight=self.unit_weight * frac,
            zero_weight=(1.0 - frac) + self.zero_weight * frac,
            normalization="full",
        )

    def cdf(self):
        """Cumulative mass at the right edge of each regular bin (units included)."""
        return self.unit_weight + np.cumsum(self.weights)


def _bin_count(l_max, delta):
    if not (delta > 0 and l_max > 0 and np.isfinite(delta) and np.isfinite(l_max)):
        raise BinningError(f"need l_max > 0 and delta > 0, got l_max={l_max}, delta={delta}")
    if delta >= l_max:
        raise BinningError("delta must be smaller than l_max")
    n = int(round(l_max / delta))
    if n > MAX_HIST_BINS:
        raise BinningError(f"{n} bins exceeds the cap of {MAX_HIST_BINS}")
    return n


def _split_add(dest, src, shift, scale):
    """Add ``scale * src`` to ``dest`` displaced by ``shift`` bins (fractional).

    Mass is split linearly between the two neighbouring bins so its mean
    position is exact. Returns the mass pushed past the end of ``dest``.
    """
    n = len(dest)
    j = int(math.floor(shift))
    f = shift - j
    lost = 0.0
    for off, w in ((j, scale * (1.0 - f)), (j + 1, scale * f)):
        if w == 0.0:
            continue
        if off >= n:
            lost += w * src.sum()
            continue
        dest[off:] += w * src[: n - off]
        lost += w * src[n - off :].sum()
    return lost


def _place_point(dest, pos, mass):
    """Put ``mass`` at fractional bin-centre index ``pos``; return overflow."""
    n = len(dest)
    if pos <= 0:
        dest[0] += mass
        return 0.0
    j = int(math.floor(pos))
    f = pos - j
    lost = 0.0
    for off, w in ((j, mass * (1.0 - f)), (j + 1, mass * f)):
        if off < n:
            dest[off] += w
        else:
            lost += w
    return lost


def histogram_convolution(params, l_max=None, delta=DEFAULT_DELTA):
    """Distribution of ``ell`` by successive binned convolution over channels.

    Each channel contributes the atoms ``{0, -ln|cos|, -ln|sin|}`` with
    probability 1/3. Bin masses sit at bin centres; every convolution step
    moves a mass by less than ``delta`` from its exact position, so the total
    displacement is below ``(N/2) delta`` (see ``displacement_bound``).
    """
    if l_max is None:
        l_max = default_l_max(params.N)
    n_bins = _bin_count(l_max, delta)
    atoms = params_table(params).log_atoms()
    p = 1.0 / 3.0

    reg = np.zeros(n_bins)
    unit, zero, over = 1.0, 0.0, 0.0
    for row in atoms:
        new = np.zeros(n_bins)
        new_unit = new_over = 0.0
        for ell in row:
            if np.isinf(ell):
                zero += p * (unit + over + reg.sum())
                continue
            new_over += p * over
            if ell == 0.0:
                new += p * reg
                new_unit += p * unit
                continue
            new_over += _split_add(new, reg, ell / delta, p)
            if unit:
                new_over += _place_point(new, ell / delta - 0.5, p * unit)
        reg, unit, over = new, new_unit, new_over

    hist = PauliHistogram(
        params.N, delta, reg, overflow=over, zero_weight=zero, unit_weight=unit,
        meta={"g": params.g, "method": "conv"},
    )
    err = abs(hist.total_mass() - 1.0)
    if err > 1e-10:
        raise ArithmeticError(f"convolution lost probability mass ({err:.3e})")
    return hist


def displacement_bound(N, delta):
    """Largest distance a mass can sit from its exact ``ell`` after convolution."""
    return (N // 2) * delta


def histogram_from_log_values(ell, N, l_max=None, delta=DEFAULT_DELTA, weights=None, meta=None):
    """Bin exact ``ell`` values (``inf`` for zeros) into a ``PauliHistogram``."""
    if l_max is None:
        l_max = default_l_max(N)
    n_bins = _bin_count(l_max, delta)
    ell = np.asarray(ell, dtype=float)
    w = np.full(ell.shape, 1.0 / ell.size) if weights is None else np.asarray(weights, float)
    w = w / w.sum()
    is_zero = np.isinf(ell)
    is_unit = ell <= UNIT_TOL
    reg = ~(is_zero | is_unit)
    idx = np.floor(ell[reg] / delta).astype(np.int64)
    inside = idx < n_bins
    counts = np.bincount(idx[inside], weights=w[reg][inside], minlength=n_bins)
    return PauliHistogram(
        N, delta, counts,
        overflow=float(w[reg][~inside].sum()),
        zero_weight=float(w[is_zero].sum()),
        unit_weight=float(w[is_unit].sum()),
        meta=dict(meta or {}),
    )


def to_log(values):
    values = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        ell = -np.log(values)
    ell[values == 0.0] = np.inf
    ell[np.abs(values - 1.0) <= UNIT_TOL] = 0.0
    return ell


def histogram_exact(params, l_max=None, delta=DEFAULT_DELTA, max_n=30):
    enum = enumerate_spectrum(params, max_n=max_n)
    return histogram_from_log_values(
        to_log(enum.values), params.N, l_max, delta, meta={"g": params.g, "method": "exact"}
    )


# ---------------------------------------------------------------------------
# sampling


def _block_log_samples(log_table, seed, block):
    ss = np.random.SeedSequence(seed, spawn_key=(block,))
    rng = np.random.Generator(np.random.PCG64(ss))
    n_ch = log_table.shape[0]
    choice = rng.integers(0, 3, size=(SAMPLE_BLOCK, n_ch), dtype=np.int8)
    picked = log_table[np.arange(n_ch), choice]
    return picked.sum(axis=1)


def sample_log_spectrum(params, n_samples, seed=0, start=0):
    """``ell`` for samples ``start .. start + n_samples - 1`` of the nonzero spectrum.

    Sample ``i`` is a pure function of ``(seed, i)``: it is drawn from block
    ``i // SAMPLE_BLOCK`` whose generator is keyed by the seed and block index,
    so any split of the index range gives identical values.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    log_table = params_table(params).log_atoms()
    stop = start + n_samples
    out = np.empty(n_samples)
    pos = 0
    for block in range(start // SAMPLE_BLOCK, (stop - 1) // SAMPLE_BLOCK + 1):
        lo = max(start, block * SAMPLE_BLOCK) - block * SAMPLE_BLOCK
        hi = min(stop, (block + 1) * SAMPLE_BLOCK) - block * SAMPLE_BLOCK
        chunk = _block_log_samples(log_table, seed, block)[lo:hi]
        out[pos : pos + len(chunk)] = chunk
        pos += len(chunk)
    return out


def sample_spectrum(params, n_samples, seed=0, start=0):
    """Magnitudes ``x`` of uniformly drawn nonzero Pauli strings."""
    return np.exp(-sample_log_spectrum(params, n_samples, seed, start))


def iter_sample_batches(params, n_samples, seed=0, batch_size=SAMPLE_BLOCK * 16):
    for start in range(0, n_samples, batch_size):
        yield sample_spectrum(params, min(batch_size, n_samples - start), seed, start)


def histogram_sampled(params, n_samples, seed=0, l_max=None, delta=DEFAULT_DELTA):
    ell = sample_log_spectrum(params, n_samples, seed)
    return histogram_from_log_values(
        ell, params.N, l_max, delta,
        meta={"g": params.g, "method": "sample", "samples": n_samples, "seed": seed},
    )


# ---------------------------------------------------------------------------
# magic gap


def magic_gap(params):
    """One minus the largest string magnitude that is not a unit.

    The largest non-unit product keeps every channel at 1 except one, so only
    single-channel values need scanning. Zero values are valid candidates.
    """
    cand = params_table(params).values[:, 1:].ravel()
    cand = cand[np.abs(cand - 1.0) > UNIT_TOL]
    if cand.size == 0:
        return 1.0
    return float(1.0 - cand.max())


# ---------------------------------------------------------------------------
# x-domain views, distances and tail fits


def x_histogram(hist, n_bins=DEFAULT_X_BINS, normalize=True):
    """Rebin the nonzero distribution onto ``n_bins`` uniform bins of ``x`` in [0, 1].

    Density is taken uniform in ``x`` within each ``ell`` bin. Overflow mass
    lies in ``(0, exp(-l_max))``, unit mass at ``x = 1``; zeros are dropped.
    """
    # CDF of x at the x-images of the ell edges, ascending in x
    x_pts = np.exp(-hist.edges[::-1])
    cum = hist.overflow + np.concatenate([[0.0], np.cumsum(hist.weights[::-1])])
    x_pts = np.concatenate([[0.0], x_pts])
    cum = np.concatenate([[0.0], cum])
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    w = np.diff(np.interp(edges, x_pts, cum))
    w[-1] += hist.unit_weight
    if normalize:
        total = w.sum()
        if total > 0:
            w = w / total
    return edges, w


def ks_distance(p, q):
    """Kolmogorov-Smirnov distance between two histograms on the same bins."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    return float(np.max(np.abs(np.cumsum(p) / p.sum() - np.cumsum(q) / q.sum())))


def tv_distance(p, q):
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    return float(0.5 * np.abs(p / p.sum() - q / q.sum()).sum())


def hist_ks(a, b):
    """KS distance between two ``ell`` histograms with identical bins.

    Units, regular bins and overflow are compared in that order; zeros are
    excluded (both are renormalized over nonzero mass).
    """
    if a.n_bins != b.n_bins or a.delta != b.delta:
        raise BinningError("histograms have different bins")
    pa = np.concatenate([[a.unit_weight], a.weights, [a.overflow]])
    pb = np.concatenate([[b.unit_weight], b.weights, [b.overflow]])
    return ks_distance(pa, pb)


def coarsen(hist, factor):
    """Merge ``factor`` consecutive bins (trailing partial group goes to overflow)."""
    n = (hist.n_bins // factor) * factor
    w = hist.weights[:n].reshape(-1, factor).sum(axis=1)
    return replace(
        hist, delta=hist.delta * factor, weights=w,
        overflow=hist.overflow + float(hist.weights[n:].sum()),
    )


def binning_error_bound(ell, weights, edges, displacement):
    """Upper bound on the TV distance between exact and convolved histograms.

    A mass at exact position ``ell`` ends up within ``displacement`` of it, so
    it can only change bin if an edge lies within that distance. The total
    mass of such points bounds the total-variation distance.
    """
    ell = np.asarray(ell, float)
    w = np.asarray(weights, float)
    w = w / w.sum()
    finite = np.isfinite(ell) & (ell > UNIT_TOL)
    e = ell[finite]
    i = np.searchsorted(edges, e)
    left = edges[np.clip(i - 1, 0, len(edges) - 1)]
    right = edges[np.clip(i, 0, len(edges) - 1)]
    near = (np.abs(e - left) <= displacement) | (np.abs(right - e) <= displacement)
    return float(w[finite][near].sum())


@dataclass(frozen=True)
class TailFit:
    slope: float
    intercept: float
    stderr: float
    n_points: int


def fit_exponential_tail(hist, fit_window=(0.05, 0.5), n_xbins=DEFAULT_X_BINS):
    """Least-squares slope of ``ln P(x)`` against ``x`` inside ``fit_window``.

    ``P`` is the density of nonzero magnitudes on ``n_xbins`` uniform x bins;
    only populated bins whose centre lies in the window enter the fit.
    """
    lo, hi = fit_window
    edges, w = x_histogram(hist, n_xbins, normalize=True)
    width = edges[1] - edges[0]
    c = 0.5 * (edges[1:] + edges[:-1])
    m = (c >= lo) & (c <= hi) & (w > 0)
    if m.sum() < 5:
        raise InsufficientDataError(f"only {int(m.sum())} populated bins in window {fit_window}")
    res = stats.linregress(c[m], np.log(w[m] / width))
    return TailFit(float(res.slope), float(res.intercept), float(res.stderr), int(m.sum()))


def scaling_exponent(sizes, slopes):
    """Log-log regression exponent of ``|slope|`` against ``N``."""
    res = stats.linregress(np.log(np.asarray(sizes, float)), np.log(np.abs(slopes)))
    return float(res.slope)


def local_maxima(weights):
    """Indices of bin-level local maxima (plateaus count once, at their left end)."""
    w = np.asarray(weights, float)
    out = []
    n = len(w)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and w[j + 1] == w[i]:
            j += 1
        left_ok = i == 0 or w[i - 1] < w[i]
        right_ok = j == n - 1 or w[j + 1] < w[i]
        if left_ok and right_ok and w[i] > 0:
            out.append(i)
        i = j + 1
    return out


# ---------------------------------------------------------------------------
# CSV interface


def write_histogram_csv(hist, fh):
    """Write ``bin_left,bin_right,weight`` rows; the last row is the overflow bin."""
    for key, val in (("N", hist.N), ("delta", hist.delta), ("zero_weight", hist.zero_weight),
                     ("unit_weight", hist.unit_weight), ("normalization", hist.normalization)):
        fh.write(f"# {key}={val!r}\n" if isinstance(val, float) else f"# {key}={val}\n")
    fh.write("bin_left,bin_right,weight\n")
    edges = hist.edges
    for i, w in enumerate(hist.weights):
        fh.write(f"{float(edges[i])!r},{float(edges[i + 1])!r},{float(w)!r}\n")
    fh.write(f"{float(edges[-1])!r},inf,{float(hist.overflow)!r}\n")


def read_histogram_csv(fh):
    meta = {}
    rows = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
        elif not line.startswith("bin_left"):
            rows.append([float(t) for t in line.split(",")])
    rows = np.array(rows)
    return PauliHistogram(
        N=int(meta["N"]),
        delta=float(meta["delta"]),
        weights=rows[:-1, 2].copy(),
        overflow=float(rows[-1, 2]),
        zero_weight=float(meta["zero_weight"]),
        unit_weight=float(meta["unit_weight"]),
        normalization=meta["normalization"],
    )

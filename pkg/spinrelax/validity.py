from dataclasses import asdict, dataclass
import numpy as np

# Default parameters.
VALIDITY_THRESHOLD = 0.1
EXHAUSTIVE_DELTA_MAX_N = 10
SUM_RTOL = 1e-12

@dataclass(frozen=True)
class ValidityReport:
    alpha_max: float
    delta: float
    delta_exact: bool
    gap_margin: float
    gap_margin_exchange: float
    gap_ok: bool
    collective_margin: float
    collective_ok: bool
    local_margin: float
    local_ok: bool
    collective_cross_margin: float
    local_cross_margin: float
    assumption_a_ok: bool
    threshold: float

    @property
    def ok(self):
        return self.gap_ok and self.collective_ok and self.local_ok

    def failures(self):
        names = [ ('gap', self.gap_ok), ('collective', self.collective_ok),
                  ('local', self.local_ok) ]
        return [ name for name, ok in names if not ok ]

    def to_dict(self):
        out = asdict(self)
        out['ok'] = self.ok
        return out

def _unique_sums(omegas, steps):
    sums = np.zeros(1)
    scale = max(1., float(np.sum(np.abs(omegas))) * max(abs(s) for s in steps))
    for omega in omegas:
        sums = (sums[:, None] + omega * np.asarray(steps)[None, :]).ravel()
        sums = np.unique(np.round(sums / (SUM_RTOL * scale)))
        sums = sums * (SUM_RTOL * scale)
    return sums, scale

def bohr_gap(omegas, max_n=EXHAUSTIVE_DELTA_MAX_N):
    """Half the smallest nonzero |sum_j omega_j d_j| over d_j in
    {-4, -2, 0, 2, 4}.

    Exhaustive for up to `max_n` spins and for equal frequencies;
    otherwise `min(omega) - (max(omega) - min(omega))`, clipped at zero.

    Returns
    -------
    delta, exact
        The gap and whether it was computed exhaustively.
    """
    omegas = np.asarray(omegas, dtype=float)
    if np.ptp(omegas) == 0:
        return float(omegas[0]), True
    if len(omegas) <= max_n:
        sums, scale = _unique_sums(omegas, (-4., -2., 0., 2., 4.))
        nonzero = np.abs(sums[np.abs(sums) > 10 * SUM_RTOL * scale])
        return 0.5 * float(nonzero.min()), True
    spread = omegas.max() - omegas.min()
    return max(float(omegas.min() - spread), 0.), False

# Distinct frequencies across species (spins within a species share
# one), or across spins for an entirely homogeneous or ungrouped
# ensemble.
def frequencies_distinct(ens):
    if ens.species_counts is None:
        omegas = ens.omegas
        return np.ptp(omegas) == 0 or len(np.unique(omegas)) == len(omegas)
    reps = [ ens.spins[start].omega for start, _ in ens.groups() ]
    return len(set(reps)) == len(reps)

def check_validity(ens, threshold=VALIDITY_THRESHOLD):
    spins = ens.spins
    N = len(spins)
    lam = max(abs(s.lam) for s in spins)
    kap = max(abs(s.varkappa) for s in spins)
    mu = max(abs(s.mu) for s in spins)
    nu = max(abs(s.nu) for s in spins)
    alpha_max = max(lam, kap, mu, nu)
    omega_min = float(ens.omegas.min())

    delta, exact = bohr_gap(ens.omegas)

    def ratio(num, den):
        if num == 0:
            return 0.
        return num / den if den > 0 else np.inf

    gap_margin = ratio(N * N * alpha_max ** 2, delta)
    gap_margin_exchange = ratio(N * N * lam ** 2, delta)
    collective_margin = ratio(max(kap, lam) ** 2 * N, omega_min)
    local_margin = ratio(max(mu, nu), omega_min)
    collective_cross = ratio(max(kap ** 2 * N, kap * lam * N), omega_min)
    local_cross = ratio(max(nu ** 2, nu * mu), omega_min)

    return ValidityReport(
        alpha_max=float(alpha_max), delta=float(delta), delta_exact=exact,
        gap_margin=float(gap_margin),
        gap_margin_exchange=float(gap_margin_exchange),
        gap_ok=bool(gap_margin < threshold),
        collective_margin=float(collective_margin),
        collective_ok=bool(collective_margin < threshold),
        local_margin=float(local_margin),
        local_ok=bool(local_margin < threshold),
        collective_cross_margin=float(collective_cross),
        local_cross_margin=float(local_cross),
        assumption_a_ok=frequencies_distinct(ens),
        threshold=float(threshold),
    )

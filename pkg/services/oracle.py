"""
Exact comparators: visitation measures, the executable-policy gap and its
bound, and brute-force oracles independent of the augmented construction.
"""
import itertools
from collections import defaultdict
from typing import Callable, DefaultDict, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import BRUTE_FORCE_POLICY_CAP
from models.aug import (
    MODE_HAZARD,
    MODE_INITIAL,
    MODE_PRE_ARRIVAL,
    AugMdp,
    AugState,
    ExecutablePolicy,
)
from models.channels import DelayModel, MissingModel
from models.errors import InconsistentAugStateError, InstanceTooLargeError
from models.mdp import MarkovPolicy, TabularMdp
from models.oracle import GapReport, VisitationMeasure
from services.aug import (
    build_delayed_aug,
    build_missing_aug,
    delayed_mode,
    head_action,
    optimal_aug,
    theta_delay,
)
from services.instances import make_dichotomy_instance
from services.mdp_core import value_iteration
from utils.logger import logger

CONVEXITY_TOL = 1e-12


def visitation(aug: AugMdp, pol: ExecutablePolicy) -> VisitationMeasure:
    """
    Forward recursion of augmented-state probabilities under an executable policy.

    Raises:
        PolicyCoverageError: if the policy misses a reachable augmented state
    """
    rho: List[Dict[AugState, float]] = []
    mass = np.array(aug.root_weights, dtype=float)
    for h, layer in enumerate(aug.layers):
        rho.append({tau: float(m) for tau, m in zip(layer.states, mass) if m > 0.0})
        if h == aug.horizon - 1:
            break
        pi = pol.matrix(h, layer.states)
        flow = mass[:, None, None] * pi[:, :, None] * layer.probs
        following = np.zeros(aug.layers[h + 1].size)
        valid = layer.successors >= 0
        np.add.at(following, layer.successors[valid], flow[valid])
        mass = following
    return VisitationMeasure(rho=rho)


def markov_visitation(mdp: TabularMdp, model: DelayModel, pol: MarkovPolicy) -> VisitationMeasure:
    """
    Distribution of augmented states when a Markov policy acts on the latent state.

    The latent states not yet delivered are carried alongside ``τ`` so that an
    arrival reveals the state that was actually visited.
    """
    H, S, A = mdp.horizon, mdp.num_states, mdp.num_actions
    joint: DefaultDict[Tuple[AugState, Tuple[int, ...]], float] = defaultdict(float)
    for s0, p0 in enumerate(mdp.initial_dist):
        if p0 <= 0.0:
            continue
        if model.initial_delay > 0:
            joint[(AugState(None, (), 0), (s0,))] += float(p0)
        else:
            joint[(AugState(s0, (), 0), ())] += float(p0)

    rho: List[Dict[AugState, float]] = []
    for h in range(H):
        marginal: DefaultDict[AugState, float] = defaultdict(float)
        for (tau, _), p in joint.items():
            marginal[tau] += p
        rho.append(dict(marginal))
        if h == H - 1:
            break
        following: DefaultDict[Tuple[AugState, Tuple[int, ...]], float] = defaultdict(float)
        for (tau, pending), p in joint.items():
            latent = pending[-1] if pending else tau.last_seen
            mode = delayed_mode("delayed-expected", tau, h, H, model.initial_delay)
            for a in range(A):
                pa = float(pol.action_dist[h, latent, a])
                if pa <= 0.0:
                    continue
                grown = tau.window + (a,)
                theta = 1.0
                if mode == MODE_HAZARD:
                    t = h - len(tau.window)
                    head = head_action(tau, a)
                    theta = theta_delay(model, tau.last_seen, head, tau.staleness, step=t)
                for s_next in range(S):
                    w = p * pa * float(mdp.kernel[h, latent, a, s_next])
                    if w <= 0.0:
                        continue
                    extended = pending + (s_next,)
                    if mode == MODE_PRE_ARRIVAL:
                        following[(AugState(None, grown, tau.staleness + 1), extended)] += w
                    elif mode == MODE_INITIAL:
                        following[(AugState(extended[0], grown, 0), extended[1:])] += w
                    else:
                        if theta > 0.0:
                            arrived = AugState(extended[0], grown[1:], 0)
                            following[(arrived, extended[1:])] += w * theta
                        if theta < 1.0:
                            stayed = AugState(tau.last_seen, grown, tau.staleness + 1)
                            following[(stayed, extended)] += w * (1.0 - theta)
        joint = following
    return VisitationMeasure(rho=rho)


def convexity_loss(beliefs: np.ndarray, reward: np.ndarray) -> np.ndarray:
    """
    ``Σ_s b(s) max_a r(s, a) - max_a Σ_s b(s) r(s, a)`` per belief row, clamped at zero.

    Raises:
        InconsistentAugStateError: if a row is negative beyond rounding
    """
    loss = beliefs @ reward.max(axis=1) - (beliefs @ reward).max(axis=1)
    if loss.size and loss.min() < -CONVEXITY_TOL:
        i = int(np.argmin(loss))
        raise InconsistentAugStateError(
            f"belief row {i} has negative convexity loss {loss[i]:.3g}"
        )
    return np.maximum(loss, 0.0)


def gap_bound(mdp: TabularMdp, model: DelayModel, cap: Optional[int] = None) -> GapReport:
    """
    Exact gap between the full-observability and the executable optimum, with its bound.

    Per step, ``E1`` integrates the convexity loss of the belief-averaged
    reward against the pointwise minimum of the two visitation measures and
    ``E2`` is their total-variation distance; the bound is ``Σ_h E1 + 2·E2``.
    """
    nodelay_pol, nodelay_values = value_iteration(mdp)
    v_nodelay = nodelay_values.initial_value(mdp.initial_dist)
    aug = build_delayed_aug(mdp, model, cap)
    delay_pol, delay_values = optimal_aug(aug)
    v_delay = delay_values.value

    rho_delay = visitation(aug, delay_pol).rho
    rho_nodelay = markov_visitation(mdp, model, nodelay_pol).rho

    e1: List[float] = []
    e2: List[float] = []
    for h, layer in enumerate(aug.layers):
        convexity = convexity_loss(layer.beliefs, mdp.reward[h])
        term = 0.0
        for tau, p_delay in rho_delay[h].items():
            p_nodelay = rho_nodelay[h].get(tau, 0.0)
            if p_nodelay > 0.0:
                term += float(convexity[layer.index[tau]]) * min(p_delay, p_nodelay)
        e1.append(term)
        support = set(rho_delay[h]) | set(rho_nodelay[h])
        spread = sum(
            abs(rho_delay[h].get(tau, 0.0) - rho_nodelay[h].get(tau, 0.0)) for tau in support
        )
        e2.append(0.5 * spread)

    report = GapReport(
        exact_gap=v_nodelay - v_delay,
        bound=float(sum(e1) + 2.0 * sum(e2)),
        e1=e1,
        e2=e2,
        v_nodelay=v_nodelay,
        v_delay=v_delay,
    )
    logger.info(f"Gap on {mdp.name}: exact {report.exact_gap:.6f}, bound {report.bound:.6f}")
    return report


def dichotomy_gaps(d: int, horizon: int, cap: Optional[int] = None) -> Dict[str, float]:
    """Exact gaps on the dichotomy instance under delays ``d`` and ``d+1``."""
    mdp, at_d, at_d_plus_1 = make_dichotomy_instance(d, horizon)
    report_d = gap_bound(mdp, at_d, cap)
    report_d_plus_1 = gap_bound(mdp, at_d_plus_1, cap)
    return {
        "d": d,
        "H": horizon,
        "v_nodelay": report_d.v_nodelay,
        "v_delay_d": report_d.v_delay,
        "v_delay_d_plus_1": report_d_plus_1.v_delay,
        "gap_d": report_d.exact_gap,
        "gap_d_plus_1": report_d_plus_1.exact_gap,
    }


def dichotomy_table(
    ds: Sequence[int] = (1, 2, 3), cap: Optional[int] = None
) -> List[Dict[str, float]]:
    """One row per d on the instance with horizon ``d + 2``."""
    return [dichotomy_gaps(d, d + 2, cap) for d in ds]


# Latent-history oracle. Particles are keyed by (latent states, delays or
# observation flags, actions) up to the current step.
Particle = Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]
AgentStateFn = Callable[[Particle, int], AugState]


def _delayed_agent_state(horizon: int) -> AgentStateFn:
    def fn(particle: Particle, h: int) -> AugState:
        latent, delays, actions = particle
        seen = [i for i in range(h + 1) if i + delays[i] <= h]
        if not seen:
            return AugState(None, actions[:h], h)
        t = seen[-1]
        return AugState(latent[t], actions[t:h], h - (t + delays[t]))

    return fn


def _missing_agent_state(particle: Particle, h: int) -> AugState:
    latent, observed, actions = particle
    t = max(i for i in range(h + 1) if observed[i])
    return AugState(latent[t], actions[t:h], h - t)


class _LatentSearch:
    """Exhaustive search over deterministic executable policies on latent histories."""

    def __init__(
        self,
        mdp: TabularMdp,
        model: DelayModel | MissingModel,
        policy_cap: int,
    ):
        self.mdp = mdp
        self.model = model
        self.policy_cap = policy_cap
        self.policies = 0
        H = mdp.horizon
        if isinstance(model, DelayModel):
            self.agent_state: AgentStateFn = _delayed_agent_state(H)
        else:
            self.agent_state = _missing_agent_state

    def roots(self) -> Dict[Particle, float]:
        out: Dict[Particle, float] = {}
        for s0, p0 in enumerate(self.mdp.initial_dist):
            if p0 > 0.0:
                tag = self.model.initial_delay if isinstance(self.model, DelayModel) else 1
                out[((s0,), (tag,), ())] = float(p0)
        return out

    def _step(
        self, particles: Dict[Particle, float], h: int, act: Callable[[AugState], int]
    ) -> Tuple[Dict[Particle, float], float]:
        mdp, model, H = self.mdp, self.model, self.mdp.horizon
        following: DefaultDict[Particle, float] = defaultdict(float)
        gained = 0.0
        for particle, p in particles.items():
            latent, tags, actions = particle
            s = latent[-1]
            a = act(self.agent_state(particle, h))
            gained += p * float(mdp.reward[h, s, a])
            if h == H - 1:
                continue
            if isinstance(model, DelayModel):
                branches = [
                    (min(tags[-1] + delta, H), float(q))
                    for delta, q in enumerate(model.pmf[h, s, a])
                    if q > 0.0
                ]
            else:
                lam = float(model.rates[h + 1])
                branches = [(flag, q) for flag, q in ((1, lam), (0, 1.0 - lam)) if q > 0.0]
            for s_next in range(mdp.num_states):
                k = float(mdp.kernel[h, s, a, s_next])
                if k <= 0.0:
                    continue
                for tag, q in branches:
                    following[(latent + (s_next,), tags + (tag,), actions + (a,))] += p * k * q
        return dict(following), gained

    def evaluate(self, policy: Callable[[int, AugState], int]) -> float:
        """Expected return of a deterministic executable policy."""
        particles, total = self.roots(), 0.0
        for h in range(self.mdp.horizon):
            particles, gained = self._step(particles, h, lambda tau: policy(h, tau))
            total += gained
        return total

    def best(self, particles: Dict[Particle, float], h: int) -> float:
        H, A = self.mdp.horizon, self.mdp.num_actions
        groups: DefaultDict[AugState, List[Tuple[int, float]]] = defaultdict(list)
        for particle, p in particles.items():
            groups[self.agent_state(particle, h)].append((particle[0][-1], p))
        taus = sorted(groups, key=repr)
        if h == H - 1:
            self.policies += 1
            return sum(
                max(
                    sum(p * float(self.mdp.reward[h, s, a]) for s, p in groups[tau])
                    for a in range(A)
                )
                for tau in taus
            )
        if A ** len(taus) > self.policy_cap:
            raise InstanceTooLargeError(
                f"step {h} has {len(taus)} reachable histories: {A}^{len(taus)} assignments exceed "
                f"the policy cap {self.policy_cap}"
            )
        best = -np.inf
        for assignment in itertools.product(range(A), repeat=len(taus)):
            if self.policies > self.policy_cap:
                raise InstanceTooLargeError(
                    f"more than {self.policy_cap} deterministic policies enumerated"
                )
            table = dict(zip(taus, assignment))
            following, gained = self._step(particles, h, table.__getitem__)
            best = max(best, gained + self.best(following, h + 1))
        return float(best)


def latent_value(
    mdp: TabularMdp,
    model: DelayModel | MissingModel,
    policy: Callable[[int, AugState], int],
) -> float:
    """Expected return of a deterministic executable policy by enumerating latent histories."""
    return _LatentSearch(mdp, model, policy_cap=1).evaluate(policy)


def brute_force_optimal_executable(
    mdp: TabularMdp,
    model: DelayModel | MissingModel,
    policy_cap: Optional[int] = None,
) -> float:
    """
    Best expected return over deterministic executable policies by exhaustive search.

    Histories reachable under the partial policy are enumerated step by step;
    the last step is maximized per history.

    Raises:
        InstanceTooLargeError: if more than ``policy_cap`` policies would be enumerated
    """
    cap = policy_cap if policy_cap is not None else BRUTE_FORCE_POLICY_CAP
    search = _LatentSearch(mdp, model, cap)
    value = search.best(search.roots(), 0)
    logger.info(f"Brute force on {mdp.name}: {search.policies} policies, value {value:.6f}")
    return value


def confidence_set_grid_value(
    reward: np.ndarray,
    kernel: np.ndarray,
    radius: np.ndarray,
    model: MissingModel,
    initial_dist: np.ndarray,
    points: int = 3,
    cap: Optional[int] = None,
) -> float:
    """
    Best executable value over a grid of two-state kernels inside the L1 confidence balls.

    Raises:
        InstanceTooLargeError: if the grid holds more kernels than the brute-force cap
        ValueError: unless the instance has exactly two states
    """
    H, S, A = reward.shape
    if S != 2:
        raise ValueError("the confidence-set grid oracle handles two-state instances only")
    limit = cap if cap is not None else BRUTE_FORCE_POLICY_CAP
    rows = list(np.ndindex(H - 1, S, A))
    if points ** len(rows) > limit:
        raise InstanceTooLargeError(f"{points}^{len(rows)} grid kernels exceed the cap {limit}")
    axes = []
    for h, s, a in rows:
        center, half = float(kernel[h, s, a, 0]), float(radius[h, s, a]) / 2.0
        axes.append(np.linspace(max(0.0, center - half), min(1.0, center + half), points))
    best = -np.inf
    for choice in itertools.product(*axes):
        candidate = np.zeros((H - 1, S, A, S))
        for (h, s, a), p0 in zip(rows, choice):
            candidate[h, s, a] = (p0, 1.0 - p0)
        mdp = TabularMdp(reward=reward, kernel=candidate, initial_dist=initial_dist, name="grid")
        best = max(best, optimal_aug(build_missing_aug(mdp, model))[1].value)
    return float(best)

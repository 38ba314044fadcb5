"""
Simulation Step Pipeline
Connection search, network evaluation, affinity diffusion, mortality and
replacement, executed in this fixed order every step
"""

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Sequence, Tuple

from .models import Params, validate_params
from .network import Link, Network, Profile
from .rng import StreamSet, gaussian, permutation, uniform
from .tiers import Tier, tier_band, tier_caps

logger = logging.getLogger(__name__)

# One step is 10 days
STEP_YEARS = 10 / 365.25

MIN_AGE = 10.0
MAX_AGE = 80.0
NEWBORN_AGE = 10.0

# Share of maxNetwork searched for new acquaintances each step
SEARCH_PERCENT = 30

# Noise sd grows by this factor for each tier below Strongest
DISTORTION_GROWTH = 1.1

# Tiers that pull on a profile's affinity, and how hard
INFLUENCE_WEIGHTS: Dict[Tier, int] = {Tier.STRONGEST: 3, Tier.STRONG: 2, Tier.MEDIUM: 1}


@dataclass
class StepEvents:
    """What happened during one step"""

    step: int
    links_created: int = 0
    promotions: int = 0
    demotions: int = 0
    severances: int = 0
    deaths: List[int] = field(default_factory=list)
    replacements: List[int] = field(default_factory=list)


class Perception(NamedTuple):
    observer: int
    observed: int
    tier: Tier
    perceived_affinity: float


@dataclass
class EvaluationOutcome:
    """Result of evaluating one profile's personal network"""

    promotions: int = 0
    demotions: int = 0
    severances: int = 0
    # Perceptions of the links that survived, tagged with their tier after evaluation
    perceptions: List[Perception] = field(default_factory=list)


def _clamp(value: float) -> float:
    return min(1.0, max(0.0, value))


def mortality_hazard(age: float) -> float:
    """Per-step death probability, increasing in age"""
    return 1.0 - math.exp(-age / MAX_AGE)


# ============== INITIALIZATION ==============

def initialize(params: Params, streams: StreamSet) -> Network:
    """Random population with no connections"""
    violations = validate_params(params)
    if violations:
        raise ValueError("Invalid parameters: " + "; ".join(str(v) for v in violations))

    net = Network()
    for _ in range(params.max_profiles):
        age = uniform(streams.init, MIN_AGE, MAX_AGE)
        affinity = uniform(streams.init, 0.0, 1.0)
        sensibility = uniform(streams.init, 0.0, 1.0)
        influentiability = uniform(streams.init, 0.0, 1.0)
        if params.initial_affinity is not None:
            affinity = params.initial_affinity
        net.add_profile(age, affinity, sensibility, influentiability)

    logger.debug(f"Initialized network with {len(net)} profiles (seed {streams.seed})")
    return net


# ============== PERCEPTION ==============

def perceive_affinity(
    observer: Profile,
    observed: Profile,
    tier: Tier,
    distortion: float,
    stream,
) -> Perception:
    """Observed affinity plus Gaussian noise whose sd grows 1.1x per weaker tier"""
    sd = distortion * DISTORTION_GROWTH ** int(tier)
    perceived = _clamp(observed.affinity + gaussian(stream, 0.0, sd))
    return Perception(observer.id, observed.id, tier, perceived)


# ============== PHASE 1: CONNECTION SEARCH ==============

def create_connections(
    net: Network,
    profile: Profile,
    params: Params,
    streams: StreamSet,
    quota: int | None = None,
) -> List[Link]:
    """
    Link the profile to its closest-in-age unconnected peers whose perceived
    affinity lies within aff_radius

    The number of peers considered is min(30% of max_network, free Weakest
    slots, remaining degree budget). An explicit quota replaces that number
    and ignores the Weakest cap (still bounded by the degree budget).
    """
    budget = params.max_network - net.out_degree(profile.id)
    if budget <= 0:
        return []

    if quota is None:
        free_weakest = tier_caps(params.max_network)[Tier.WEAKEST] - net.tier_count(profile.id, Tier.WEAKEST)
        n = min(params.max_network * SEARCH_PERCENT // 100, free_weakest, budget)
    else:
        n = min(quota, budget)
    if n <= 0:
        return []

    existing = net.out_links(profile.id)
    candidates = [
        other for other_id, other in net.profiles.items()
        if other_id != profile.id and other_id not in existing
    ]
    closest = heapq.nsmallest(n, candidates, key=lambda other: (abs(other.age - profile.age), other.id))

    created = []
    for other in closest:
        perception = perceive_affinity(profile, other, Tier.WEAKEST, params.distortion, streams.perception)
        if abs(perception.perceived_affinity - profile.affinity) <= params.aff_radius:
            net.add_link(profile.id, other.id, Tier.WEAKEST)
            created.append(Link(profile.id, other.id, Tier.WEAKEST))
    return created


# ============== PHASE 2: NETWORK EVALUATION ==============

def evaluate_network(
    net: Network,
    profile: Profile,
    params: Params,
    streams: StreamSet,
) -> EvaluationOutcome:
    """
    Re-perceive every out-link and move it at most one tier

    Out of radius: with probability sensibility the link is demoted, and a
    Weakest link is severed. Within the next stronger tier's band: promoted
    if that tier has room. A demotion into a full tier leaves the link as is.
    """
    caps = tier_caps(params.max_network)
    own = profile.affinity
    outcome = EvaluationOutcome()

    for target_id in sorted(net.out_links(profile.id)):
        tier = net.tier_of(profile.id, target_id)
        perception = perceive_affinity(profile, net.profiles[target_id], tier, params.distortion, streams.perception)
        perceived = perception.perceived_affinity

        if abs(perceived - own) > params.aff_radius:
            if uniform(streams.rejection, 0.0, 1.0) < profile.sensibility:
                weaker = tier.weaker()
                if weaker is None:
                    net.remove_link(profile.id, target_id)
                    outcome.severances += 1
                    continue
                if net.tier_count(profile.id, weaker) < caps[weaker]:
                    net.set_tier(profile.id, target_id, weaker)
                    outcome.demotions += 1
                    tier = weaker
        else:
            stronger = tier.stronger()
            if stronger is not None:
                lo, hi = tier_band(stronger, own, params.aff_radius)
                if lo <= perceived <= hi and net.tier_count(profile.id, stronger) < caps[stronger]:
                    net.set_tier(profile.id, target_id, stronger)
                    outcome.promotions += 1
                    tier = stronger

        outcome.perceptions.append(perception._replace(tier=tier))

    return outcome


# ============== PHASE 3: AFFINITY VARIATION ==============

def influence_perceptions(
    net: Network,
    profile: Profile,
    params: Params,
    streams: StreamSet,
) -> List[Perception]:
    """Fresh perceptions of the profile's Medium-or-stronger out-links, in target id order"""
    perceptions = []
    for target_id, tier in sorted(net.out_links(profile.id).items()):
        if tier in INFLUENCE_WEIGHTS:
            perceptions.append(
                perceive_affinity(profile, net.profiles[target_id], tier, params.distortion, streams.perception)
            )
    return perceptions


def update_affinity(profile: Profile, perceptions: Sequence[Perception], params: Params) -> float:
    """
    New affinity from the perceived affinities of Medium-or-stronger ties

    Neighbours weigh 3/2/1 (Strongest/Strong/Medium) and the profile's own
    affinity weighs as much as all neighbours together. The move towards the
    weighted mean is scaled by influentiability and capped at max_change.
    """
    total_weight = 0
    weighted_sum = 0.0
    for perception in perceptions:
        weight = INFLUENCE_WEIGHTS.get(perception.tier, 0)
        total_weight += weight
        weighted_sum += weight * perception.perceived_affinity
    if total_weight == 0:
        return profile.affinity

    own = profile.affinity
    mean = (total_weight * own + weighted_sum) / (2 * total_weight)
    raw_delta = mean - own
    applied = math.copysign(min(abs(profile.influentiability * raw_delta), params.max_change), raw_delta)
    return _clamp(own + applied)


# ============== PHASES 4-5: MORTALITY AND REPLACEMENT ==============

def mortality(net: Network, params: Params, streams: StreamSet) -> List[int]:
    """
    Ids of the profiles that die this step

    Everyone aged 80 or more dies. Of the rest, a profile is a candidate when
    its draw u falls below the hazard h(age); the people_dead candidates with
    the smallest u/h die.
    """
    forced = [pid for pid in net.ids() if net.profiles[pid].age >= MAX_AGE]
    if params.people_dead == 0:
        return forced

    forced_set = set(forced)
    candidates: List[Tuple[float, int]] = []
    for pid in net.ids():
        if pid in forced_set:
            continue
        hazard = mortality_hazard(net.profiles[pid].age)
        u = uniform(streams.mortality, 0.0, 1.0)
        if u < hazard:
            candidates.append((u / hazard, pid))
    candidates.sort()
    chosen = sorted(pid for _, pid in candidates[:params.people_dead])
    return forced + chosen


def replace_agents(net: Network, deaths: Sequence[int], streams: StreamSet) -> List[Profile]:
    """Remove the dead with all their links and add one unconnected 10-year-old per death"""
    for pid in deaths:
        net.remove_profile(pid)

    newborns = []
    for _ in deaths:
        affinity = uniform(streams.replacement, 0.0, 1.0)
        sensibility = uniform(streams.replacement, 0.0, 1.0)
        influentiability = uniform(streams.replacement, 0.0, 1.0)
        newborns.append(net.add_profile(NEWBORN_AGE, affinity, sensibility, influentiability))
    return newborns


# ============== STEP ==============

def step(net: Network, params: Params, streams: StreamSet) -> Tuple[Network, StepEvents]:
    """Advance the network by one 10-day step"""
    events = StepEvents(step=net.step_index + 1)
    order = net.ids()

    for index in permutation(streams.scheduling, len(order)):
        created = create_connections(net, net.profiles[order[index]], params, streams)
        events.links_created += len(created)

    for index in permutation(streams.scheduling, len(order)):
        outcome = evaluate_network(net, net.profiles[order[index]], params, streams)
        events.promotions += outcome.promotions
        events.demotions += outcome.demotions
        events.severances += outcome.severances

    # Applied in turn: later profiles perceive the affinities already updated
    for index in permutation(streams.scheduling, len(order)):
        profile = net.profiles[order[index]]
        profile.affinity = update_affinity(profile, influence_perceptions(net, profile, params, streams), params)

    events.deaths = mortality(net, params, streams)
    events.replacements = [profile.id for profile in replace_agents(net, events.deaths, streams)]

    for profile in net.profiles.values():
        profile.age += STEP_YEARS
    net.step_index += 1
    return net, events

"""
Social Network State
Profiles and the tiered directed adjacency between them
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Set

from .tiers import Tier, tier_caps


@dataclass(slots=True)
class Profile:
    """One social-network account"""

    id: int
    age: float
    affinity: float
    sensibility: float
    influentiability: float


class Link(NamedTuple):
    source: int
    target: int
    tier: Tier


class Network:
    """
    Population plus directed tiered adjacency

    Out-links are kept per source as {target: tier} with per-tier counters;
    in-links are kept per target as a set of sources so removing a profile
    can drop every link pointing at it.
    """

    def __init__(self, profiles: Iterable[Profile] = (), step_index: int = 0):
        self.profiles: Dict[int, Profile] = {}
        self.step_index = step_index
        self._out: Dict[int, Dict[int, Tier]] = {}
        self._in: Dict[int, Set[int]] = {}
        self._tier_counts: Dict[int, List[int]] = {}
        self._next_id = 0
        for profile in profiles:
            self._insert(profile)

    # ============== PROFILES ==============

    def _insert(self, profile: Profile) -> None:
        if profile.id in self.profiles:
            raise ValueError(f"Duplicate profile id: {profile.id}")
        self.profiles[profile.id] = profile
        self._out[profile.id] = {}
        self._in[profile.id] = set()
        self._tier_counts[profile.id] = [0] * len(Tier)
        self._next_id = max(self._next_id, profile.id + 1)

    def add_profile(
        self,
        age: float,
        affinity: float,
        sensibility: float,
        influentiability: float,
    ) -> Profile:
        """Create a profile with the next free id and no links"""
        profile = Profile(
            id=self._next_id,
            age=age,
            affinity=affinity,
            sensibility=sensibility,
            influentiability=influentiability,
        )
        self._insert(profile)
        return profile

    def remove_profile(self, profile_id: int) -> int:
        """Remove a profile and every link to or from it; returns the number of links dropped"""
        if profile_id not in self.profiles:
            raise KeyError(profile_id)
        dropped = 0
        for target in list(self._out[profile_id]):
            self.remove_link(profile_id, target)
            dropped += 1
        for source in list(self._in[profile_id]):
            self.remove_link(source, profile_id)
            dropped += 1
        del self.profiles[profile_id]
        del self._out[profile_id]
        del self._in[profile_id]
        del self._tier_counts[profile_id]
        return dropped

    def ids(self) -> List[int]:
        return sorted(self.profiles)

    def __len__(self) -> int:
        return len(self.profiles)

    def __contains__(self, profile_id: object) -> bool:
        return profile_id in self.profiles

    # ============== LINKS ==============

    def add_link(self, source: int, target: int, tier: Tier = Tier.WEAKEST) -> None:
        if source == target:
            raise ValueError(f"Self-link on profile {source}")
        if source not in self.profiles or target not in self.profiles:
            raise KeyError(f"Unknown endpoint in link {source}->{target}")
        if target in self._out[source]:
            raise ValueError(f"Link {source}->{target} already exists")
        self._out[source][target] = tier
        self._in[target].add(source)
        self._tier_counts[source][tier] += 1

    def set_tier(self, source: int, target: int, tier: Tier) -> None:
        old = self._out[source][target]
        self._tier_counts[source][old] -= 1
        self._tier_counts[source][tier] += 1
        self._out[source][target] = tier

    def remove_link(self, source: int, target: int) -> None:
        tier = self._out[source].pop(target)
        self._in[target].discard(source)
        self._tier_counts[source][tier] -= 1

    def tier_of(self, source: int, target: int) -> Optional[Tier]:
        return self._out.get(source, {}).get(target)

    def out_links(self, profile_id: int) -> Mapping[int, Tier]:
        return self._out[profile_id]

    def in_links(self, profile_id: int) -> frozenset:
        return frozenset(self._in[profile_id])

    def out_degree(self, profile_id: int) -> int:
        return len(self._out[profile_id])

    def tier_count(self, profile_id: int, tier: Tier) -> int:
        return self._tier_counts[profile_id][tier]

    def links(self) -> Iterator[Link]:
        """All links ordered by (source, target)"""
        for source in self.ids():
            for target in sorted(self._out[source]):
                yield Link(source, target, self._out[source][target])

    def link_count(self) -> int:
        return sum(len(targets) for targets in self._out.values())

    def snapshot(self) -> Dict[tuple, Tier]:
        """Copy of the adjacency as {(source, target): tier}"""
        return {(link.source, link.target): link.tier for link in self.links()}

    # ============== INVARIANTS ==============

    def audit(self, max_network: int) -> List[str]:
        """Structural invariant violations (empty when the network is consistent)"""
        problems = []
        caps = tier_caps(max_network)
        for pid, targets in self._out.items():
            if len(targets) > max_network:
                problems.append(f"profile {pid}: out-degree {len(targets)} exceeds {max_network}")
            for tier in Tier:
                if self._tier_counts[pid][tier] > caps[tier]:
                    problems.append(
                        f"profile {pid}: {self._tier_counts[pid][tier]} {tier.label} links exceed cap {caps[tier]}"
                    )
            for target in targets:
                if target == pid:
                    problems.append(f"profile {pid}: self-link")
                elif target not in self.profiles:
                    problems.append(f"profile {pid}: dangling link to {target}")
                elif pid not in self._in[target]:
                    problems.append(f"link {pid}->{target} missing from reverse index")
        for pid, profile in self.profiles.items():
            if not 0.0 <= profile.affinity <= 1.0:
                problems.append(f"profile {pid}: affinity {profile.affinity} outside [0, 1]")
        return problems

"""
Built-in manifold catalog
The worked nilmanifold and solvmanifold examples as spec documents, shipped
verbatim so `cscoh catalog show` output can be copied and edited.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Mapping, Optional

from .errors import CscohError
from .linalg import ExactMatrix
from .model import ComplexInstance, change_frame, format_spec, instantiate, parse_spec
from .scalars import I, GaussianRational


KODAIRA_THURSTON = """\
# Kodaira-Thurston nilmanifold, invariant (1,0)-coframe phi1, phi2
[manifold]
name = kodaira-thurston
n = 2
generators_10 = phi1, phi2
generators_01 = phibar1, phibar2

[dbar]
phi2 = (-1/2*i) * phi1^phibar1

[del]
phibar2 = (-1/2*i) * phi1^phibar1

[omega]
(1/2)*phi1^phibar2 - (1/2)*phi2^phibar1

[metric]
weights = 2, 2

[conjugation]
phibar1 = phi1
phibar2 = phi2
"""

IWASAWA = """\
# Iwasawa manifold, invariant (1,0)-coframe psi1, psi2, psi3
[manifold]
name = iwasawa
n = 3
generators_10 = psi1, psi2, psi3
generators_01 = psibar1, psibar2, psibar3

[dbar]
psi3 = psi2^psibar1

[del]
psibar3 = -psi1^psibar2

[omega]
i*psi2^psibar2 + psi1^psibar3 - psi3^psibar1

[metric]
weights = 1, 1, 1

[conjugation]
psibar1 = psi1
psibar2 = psi2
psibar3 = psi3
"""

NAKAMURA = """\
# Nakamura manifold with its small deformations J_t, invariant coframe u (1,0) and v (0,1)
# No [del] or [conjugation]: the conjugate coframe has non-constant coefficients.
[manifold]
name = nakamura
n = 3
generators_10 = u1, u2, u3
generators_01 = v1, v2, v3

[parameters]
t = 0

[dbar]
u3 = 2*t*u1^v2

[omega]
(1/2*i)*u1^v1 + (1/2)*v2^u3 + (1/2)*u2^v3
"""

# xi1 = phi1 + i phi2, xi2 = phi1 - i phi2
XI_FRAME = ExactMatrix.from_rows([[1, I], [1, -I]])


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    text: str
    provenance: str
    parameters: Mapping[str, str] = field(default_factory=dict)

    def instantiate(self, params: Optional[Mapping[str, GaussianRational]] = None) -> ComplexInstance:
        return instantiate(parse_spec(self.text), params)


@lru_cache(maxsize=None)
def _kodaira_thurston_xi() -> str:
    spec = change_frame(
        parse_spec(KODAIRA_THURSTON),
        XI_FRAME,
        holo_names=("xi1", "xi2"),
        anti_names=("xibar1", "xibar2"),
        weights=(4, 4),
        name="kodaira-thurston-xi",
    )
    return format_spec(spec)


@lru_cache(maxsize=None)
def _entries() -> Dict[str, CatalogEntry]:
    entries = [
        CatalogEntry(
            "kodaira-thurston",
            KODAIRA_THURSTON,
            "Kodaira-Thurston nilmanifold in the coframe phi. Bott-Chern dims 1,1,2,1,3,1,1,2,1; "
            "BC harmonic forms are not closed under wedge; the dbar dbar_lambda-Lemma fails.",
        ),
        CatalogEntry(
            "kodaira-thurston-xi",
            _kodaira_thurston_xi(),
            "Kodaira-Thurston nilmanifold in the frame xi1 = phi1 + i phi2, xi2 = phi1 - i phi2, "
            "where omega = (i/4)(xi1^xibar1 - xi2^xibar2) and weights 4, 4 are admissible. "
            "Same tables and verdicts as kodaira-thurston.",
        ),
        CatalogEntry(
            "iwasawa",
            IWASAWA,
            "Iwasawa manifold. [psibar1] is nonzero in Dolbeault (0,1) while omega^2 ^ psibar1 is "
            "dbar-exact, so Hard Lefschetz fails at k=2 and the lemma fails.",
        ),
        CatalogEntry(
            "nakamura",
            NAKAMURA,
            "Nakamura manifold deformed along t. At t=0 dbar vanishes and the lemma holds; at sampled "
            "t != 0 the Massey product <[2t u1], [v2], [v2]> does not vanish and the lemma fails.",
            {"t": "deformation parameter, default 0"},
        ),
    ]
    return {entry.name: entry for entry in entries}


def list_entries() -> List[CatalogEntry]:
    return list(_entries().values())


def entry(name: str) -> CatalogEntry:
    entries = _entries()
    if name not in entries:
        raise CscohError(f"unknown catalog entry {name!r}; known entries: {', '.join(entries)}")
    return entries[name]


def get(name: str, params: Optional[Mapping[str, GaussianRational]] = None) -> ComplexInstance:
    """Validated instance of a catalog entry"""
    return entry(name).instantiate(params)

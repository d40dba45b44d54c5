"""Shared test configuration.

Property-based tests run derandomized so the suite is reproducible run
to run, matching the determinism contract of the package itself.
"""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "deterministic",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("deterministic")

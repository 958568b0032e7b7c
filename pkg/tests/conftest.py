"""Shared fixtures: scripted synthetic sessions at two sizes."""

from __future__ import annotations

import pytest

from dyadgaze.ingest import FaceFrame, load_session
from dyadgaze.sync import synchronize
from dyadgaze.synth import ParticipantScript, SessionScript, face_at, generate


def make_face(wall_us=3_000_000, phase=0.0, success=True, au_presence=None, au_intensity=None):
    """FaceFrame positioned by the synthetic face model."""
    return FaceFrame(
        frame_number=0,
        success=success,
        confidence=0.98 if success else 0.1,
        landmarks=face_at(wall_us, 1920, 1080, phase),
        au_intensity=au_intensity or {},
        au_presence=au_presence or {},
    )


@pytest.fixture
def fixture_face():
    return make_face()


SMALL_SCRIPT = SessionScript(
    duration_s=24.0,
    participants={
        "A": ParticipantScript(
            states=((0.0, 6.0, "eyes"), (6.0, 12.0, "face"), (12.0, 18.0, "eyes"), (18.0, 24.0, "away")),
            au_bursts=((2.0, 4.0, 6, 3.0), (2.0, 5.0, 12, 3.0)),
        ),
        "B": ParticipantScript(
            states=((0.0, 3.0, "eyes"), (3.0, 9.0, "face"), (9.0, 21.0, "eyes"), (21.0, 24.0, "away")),
            au_bursts=((10.0, 12.0, 12, 2.0),),
        ),
    },
    seed=11,
)


@pytest.fixture(scope="session")
def small_script():
    return SMALL_SCRIPT


@pytest.fixture(scope="session")
def small_session_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("small_session")
    truth = generate(SMALL_SCRIPT, out)
    return out, truth


@pytest.fixture(scope="session")
def small_synced(small_session_dir):
    out, truth = small_session_dir
    return synchronize(load_session(out / "session.toml")), truth


def distribution_script(duration_s=1200.0, seed=5):
    """Five contiguous blocks with exact known category proportions.

    Over `duration_s` at 25 fps: 20% mutual eye, 30% one-way A, 10%
    one-way B, 25% mutual face only, 15% none.
    """
    d = duration_s
    cuts = [0.0, 0.20 * d, 0.50 * d, 0.60 * d, 0.85 * d, d]
    a_states, b_states = [], []
    for i, (lo, hi) in enumerate(zip(cuts, cuts[1:])):
        a_states.append((lo, hi, ["eyes", "eyes", "face", "face", "away"][i]))
        b_states.append((lo, hi, ["eyes", "face", "eyes", "face", "away"][i]))
    return SessionScript(
        duration_s=d,
        participants={
            "A": ParticipantScript(states=tuple(a_states)),
            "B": ParticipantScript(states=tuple(b_states)),
        },
        seed=seed,
    )


@pytest.fixture(scope="session")
def big_session_dir(tmp_path_factory):
    """20-minute 30000-frame session with the Fig.-5-style proportions."""
    out = tmp_path_factory.mktemp("big_session")
    script = distribution_script()
    truth = generate(script, out)
    return out, script, truth


@pytest.fixture(scope="session")
def big_synced(big_session_dir):
    out, script, truth = big_session_dir
    return synchronize(load_session(out / "session.toml")), script, truth

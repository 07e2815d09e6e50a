import pytest

import mammalvoc as mv


@pytest.fixture(scope="session")
def miro_params():
    return mv.resolve_preset("miro", mv.VoiceParams())


@pytest.fixture(scope="session")
def miro_voiced(miro_params):
    """One shared neutral voiced render at the robot preset."""
    return mv.render_utterance(mv.RenderRequest(miro_params, seed=7))


@pytest.fixture(scope="session")
def miro_breath(miro_params):
    return mv.render_utterance(
        mv.RenderRequest(miro_params, seed=3, utterance_kind="breath")
    )

import pytest

from icregion.channel import ChannelParams
from icregion.trellis import GeneratorMatrix, build_conv_trellis, build_iud_trellis


@pytest.fixture(scope="session")
def params_fig4():
    return ChannelParams.from_db(7.0, 7.0, 0.5)


@pytest.fixture(scope="session")
def cc():
    return build_conv_trellis(GeneratorMatrix.from_octal("7,5"))


@pytest.fixture(scope="session")
def un():
    return build_iud_trellis(1)

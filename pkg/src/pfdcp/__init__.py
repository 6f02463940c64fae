"""Single-image dehazing with the dark channel prior and its pyramid-fusion variant."""
from .dcp import (
    DehazeParams,
    dark_channel,
    dehaze_dcp,
    estimate_atmosphere,
    estimate_transmission,
    recover,
)
from .guidedfilter import guided_filter, refine_transmission
from .imgcore import (
    box_filter,
    downsample_half,
    load_image,
    min_filter,
    save_image,
    to_gray,
    upsample_nearest,
)
from .metrics import EvalRecord, psnr, ssim
from .pyramid import (
    INDOOR,
    OUTDOOR,
    FusionWeights,
    build_pyramid,
    dehaze_pfdcp,
    fuse_transmissions,
    pf_estimate_atmosphere,
    pfdcp_stages,
)
from .synth import smooth_transmission, synthesize_haze

__version__ = "0.1.0"

from .config import SUPPORTED_PAIRS, GenConfig
from .generator import gen_instance_stream, interior_stream, obscuring_stream, stream_rng
from .noise import apply_noise, noise_delta

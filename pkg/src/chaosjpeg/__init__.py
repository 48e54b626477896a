"""Format-compliant chaotic encryption of baseline JPEG images.

The cipher works on quantized DCT coefficients: a logistic-map stream
permutes whole 8x8 blocks, a Henon-map stream XORs the nonzero AC
coefficients without changing their JPEG magnitude category. The result is
an ordinary baseline JFIF file that survives recompression at quality 71.
"""

__version__ = "0.1.0"

from .analysis import (
    ATTACK_KINDS,
    AttackMap,
    attack_dcm,
    attack_eac,
    attack_ncc,
    attack_plz,
    channel_entropy,
    leak_score,
    psnr,
    run_attack,
)
from .chaos import (
    EcuStream,
    EncryptionKey,
    HenonParams,
    LogisticParams,
    bits_from_henon,
    derive_permutation,
    generate_key,
    henon_sequence,
    logistic_sequence,
    make_ecus,
    read_key_file,
)
from .cipher import (
    BlockPermutationPlan,
    CiphertextImage,
    alpha_scale_blocks,
    check_dc_range,
    clamp_spatial,
    decrypt_ac,
    decrypt_coefficients,
    decrypt_dc_blocks,
    decrypt_image,
    encrypt_ac,
    encrypt_coefficients,
    encrypt_dc_blocks,
    encrypt_image,
    overflow_blocks,
    plan_permutations,
    repair_overflow,
)
from .errors import *  # noqa: F401,F403
from .osn import PlatformPolicy, platform_process, survival_report

__all__ = [
    "ATTACK_KINDS",
    "AttackMap",
    "BlockPermutationPlan",
    "CiphertextImage",
    "EcuStream",
    "EncryptionKey",
    "HenonParams",
    "LogisticParams",
    "PlatformPolicy",
    "alpha_scale_blocks",
    "attack_dcm",
    "attack_eac",
    "attack_ncc",
    "attack_plz",
    "bits_from_henon",
    "channel_entropy",
    "check_dc_range",
    "clamp_spatial",
    "decrypt_ac",
    "decrypt_coefficients",
    "decrypt_dc_blocks",
    "decrypt_image",
    "derive_permutation",
    "encrypt_ac",
    "encrypt_coefficients",
    "encrypt_dc_blocks",
    "encrypt_image",
    "generate_key",
    "henon_sequence",
    "leak_score",
    "logistic_sequence",
    "make_ecus",
    "overflow_blocks",
    "platform_process",
    "plan_permutations",
    "psnr",
    "read_key_file",
    "repair_overflow",
    "run_attack",
    "survival_report",
]

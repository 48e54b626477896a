from __future__ import annotations

from functools import cached_property
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from chaosjpeg.chaos import generate_key
from chaosjpeg.cipher import (
    CiphertextImage,
    decrypt_image,
    encrypt_coefficients,
    repair_overflow,
)
from chaosjpeg.jpeg import codec, compress, decode_jpeg, render
from chaosjpeg.osn import platform_process

DATA = Path(__file__).parent / "data"

# lena and mandrill are the classic test photographs; astronaut stands in for
# the third standard image, which is not redistributable
IMAGE_FILES = {
    "lena": "lena.jpg",
    "mandrill": "mandrill.jpg",
    "astronaut": "astronaut.png",
}


def load_rgb(name):
    with Image.open(DATA / IMAGE_FILES[name]) as im:
        return np.asarray(im.convert("RGB"))


class HuffmanInputRecorder:
    """Collects every plane that ``encode_jpeg`` validates before entropy coding."""

    def __init__(self):
        self.planes = []
        self._orig = None

    def __enter__(self):
        self._orig = codec.dc_range_violations

        def spy(plane):
            self.planes.append(plane)
            return self._orig(plane)

        codec.dc_range_violations = spy
        return self

    def __exit__(self, *exc):
        codec.dc_range_violations = self._orig


class EncryptedCase:
    """One corpus image pushed through the pipeline, each stage computed on demand."""

    def __init__(self, name, key, recorder):
        self.name = name
        self.key = key
        self.recorder = recorder

    @cached_property
    def img(self):
        return load_rgb(self.name)

    @cached_property
    def plain(self):
        return compress(self.img)

    @cached_property
    def encrypted(self):
        return encrypt_coefficients(self.plain, self.key)

    @cached_property
    def ct(self):
        with self.recorder:
            return CiphertextImage.from_coefficients(repair_overflow(self.encrypted))

    @cached_property
    def cipher_coefs(self):
        return decode_jpeg(self.ct.data)

    @cached_property
    def view(self):
        return render(self.cipher_coefs)

    @cached_property
    def decrypted(self):
        return decrypt_image(self.ct, self.key)

    @cached_property
    def uploaded(self):
        with self.recorder:
            return platform_process(self.ct)

    @cached_property
    def decrypted_uploaded(self):
        return decrypt_image(self.uploaded, self.key)

    @cached_property
    def ac_only(self):
        return encrypt_coefficients(self.plain, self.key, dc=False)


@pytest.fixture(scope="session")
def key():
    return generate_key(1)


@pytest.fixture(scope="session")
def huffman_inputs():
    return HuffmanInputRecorder()


@pytest.fixture(scope="session")
def corpus(key, huffman_inputs):
    return {name: EncryptedCase(name, key, huffman_inputs) for name in IMAGE_FILES}


# -- acceptance summary ------------------------------------------------------

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    def record(criterion, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

"""Baseline sequential JFIF: coefficient planes <-> bytes.

The encoder always writes Annex K Huffman tables and never optimizes them.
The decoder handles any baseline Huffman stream (SOF0/SOF1, 8-bit samples,
interleaved or single-component scans, restart intervals) and stops at the
quantized coefficients; nothing here dequantizes.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import MalformedBitstream
from .tables import (
    AC_CHROMINANCE,
    AC_LUMINANCE,
    DC_CHROMINANCE,
    DC_LUMINANCE,
    UNZIGZAG,
    ZIGZAG,
    HuffmanSpec,
    QuantTable,
)

DC_MIN, DC_MAX = -1024, 1016

SOI, EOI, SOS, DQT, DHT, DRI = 0xD8, 0xD9, 0xDA, 0xDB, 0xC4, 0xDD
SOF0, SOF1 = 0xC0, 0xC1
APP0, COM = 0xE0, 0xFE
RST0 = 0xD0

# Baseline 4:2:2 with horizontal chroma halving: Y is 2x1, Cb and Cr are 1x1.
SAMPLING_422 = ((2, 1), (1, 1), (1, 1))
COMPONENT_NAMES = ("Y", "Cb", "Cr")


@dataclass
class CoefficientPlane:
    """Quantized DCT blocks of one component, shape (blocks_h, blocks_w, 64), zigzag order."""

    component: str
    coefs: np.ndarray
    width: int
    height: int

    @property
    def blocks_h(self):
        return self.coefs.shape[0]

    @property
    def blocks_w(self):
        return self.coefs.shape[1]

    @property
    def n_blocks(self):
        return self.blocks_h * self.blocks_w

    def flat(self):
        """Blocks in raster order, shape (n_blocks, 64)."""
        return self.coefs.reshape(-1, 64)

    def copy(self, coefs=None):
        return CoefficientPlane(
            self.component,
            self.coefs.copy() if coefs is None else coefs,
            self.width,
            self.height,
        )


@dataclass
class CoefficientImage:
    """Everything a baseline JPEG carries besides its Huffman tables."""

    width: int
    height: int
    planes: list
    qtables: list
    sampling: tuple = SAMPLING_422

    def __post_init__(self):
        if not (len(self.planes) == len(self.qtables) == len(self.sampling)):
            raise ValueError("planes, qtables and sampling must have equal length")

    @property
    def is_color(self):
        return len(self.planes) == 3

    def copy(self):
        return CoefficientImage(
            self.width,
            self.height,
            [p.copy() for p in self.planes],
            list(self.qtables),
            tuple(self.sampling),
        )


def component_geometry(width, height, sampling):
    """Per component: (sample width, sample height, blocks_w, blocks_h)."""
    hmax = max(h for h, _ in sampling)
    vmax = max(v for _, v in sampling)
    out = []
    for h, v in sampling:
        cw = math.ceil(width * h / hmax)
        ch = math.ceil(height * v / vmax)
        out.append((cw, ch, math.ceil(cw / 8), math.ceil(ch / 8)))
    return out


def dc_range_violations(plane: CoefficientPlane):
    """Raster indices of blocks whose quantized DC lies outside [-1024, 1016]."""
    dc = plane.flat()[:, 0]
    return np.flatnonzero((dc < DC_MIN) | (dc > DC_MAX)).tolist()


def category(value):
    """JPEG magnitude category: bit length of |value|."""
    return abs(int(value)).bit_length()


# -- encoding -------------------------------------------------------------------

class _BitWriter:
    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.nbits = 0

    def write(self, code, length):
        self.acc = (self.acc << length) | code
        self.nbits += length
        if self.nbits >= 32:
            keep = self.nbits & 7
            nbytes = self.nbits >> 3
            self.out += (self.acc >> keep).to_bytes(nbytes, "big")
            self.acc &= (1 << keep) - 1
            self.nbits = keep

    def flush(self):
        pad = -self.nbits % 8
        if pad:
            self.write((1 << pad) - 1, pad)
        if self.nbits:
            self.out += self.acc.to_bytes(self.nbits >> 3, "big")
            self.acc = self.nbits = 0
        return bytes(self.out).replace(b"\xff", b"\xff\x00")


def _encode_block(w, block, pred, dc_codes, ac_codes):
    dc = block[0]
    diff = dc - pred
    cat = abs(diff).bit_length()
    if cat > 11:
        raise ValueError(f"DC difference {diff} exceeds 11 bits")
    code, length = dc_codes[cat]
    w.write(code, length)
    if cat:
        w.write(diff if diff > 0 else diff + (1 << cat) - 1, cat)
    run = 0
    for k in range(1, 64):
        v = block[k]
        if v == 0:
            run += 1
            continue
        while run > 15:
            code, length = ac_codes[0xF0]
            w.write(code, length)
            run -= 16
        cat = abs(v).bit_length()
        if cat > 10:
            raise ValueError(f"AC coefficient {v} exceeds the baseline range")
        code, length = ac_codes[(run << 4) | cat]
        w.write(code, length)
        w.write(v if v > 0 else v + (1 << cat) - 1, cat)
        run = 0
    if run:
        code, length = ac_codes[0x00]
        w.write(code, length)
    return dc


def _segment(marker, payload=b""):
    return struct.pack(">BBH", 0xFF, marker, len(payload) + 2) + payload


def encode_jpeg(image: CoefficientImage) -> bytes:
    """Serialize coefficient planes as a baseline JFIF byte stream.

    Raises ``ValueError`` if any DC lies outside [-1024, 1016] or any value
    does not fit the baseline Huffman categories.
    """
    n = len(image.planes)
    if n not in (1, 3):
        raise ValueError("only 1- or 3-component images are supported")
    sampling = tuple(image.sampling) if n == 3 else ((1, 1),)
    geometry = component_geometry(image.width, image.height, sampling)
    for plane, (_, _, bw, bh) in zip(image.planes, geometry):
        if (plane.blocks_w, plane.blocks_h) != (bw, bh):
            raise ValueError(
                f"{plane.component} plane is {plane.blocks_w}x{plane.blocks_h} blocks, "
                f"expected {bw}x{bh}"
            )
        bad = dc_range_violations(plane)
        if bad:
            raise ValueError(f"{plane.component} plane has DC out of range in blocks {bad[:8]}")

    # table slot 0 for luma, 1 for chroma
    slots = [0] + [1] * (n - 1)
    qtabs = {}
    for slot, q in zip(slots, image.qtables):
        if qtabs.setdefault(slot, q) != q:
            raise ValueError("chroma planes must share one quantization table")
    huff = {0: (DC_LUMINANCE, AC_LUMINANCE), 1: (DC_CHROMINANCE, AC_CHROMINANCE)}

    out = bytearray(b"\xff\xd8")
    out += _segment(APP0, b"JFIF\x00" + struct.pack(">BBBHHBB", 1, 1, 0, 1, 1, 0, 0))
    for slot in sorted(qtabs):
        entries = qtabs[slot].entries
        if max(entries) > 255:
            out += _segment(DQT, bytes([0x10 | slot]) + struct.pack(">64H", *entries))
        else:
            out += _segment(DQT, bytes([slot]) + bytes(entries))
    sof = struct.pack(">BHHB", 8, image.height, image.width, n)
    for i, ((h, v), slot) in enumerate(zip(sampling, slots)):
        sof += bytes([i + 1, (h << 4) | v, slot])
    out += _segment(SOF0, sof)
    for slot in sorted(qtabs):
        for cls, spec in enumerate(huff[slot]):
            out += _segment(DHT, bytes([(cls << 4) | slot, *spec.counts, *spec.symbols]))
    sos = bytes([n])
    for i, slot in enumerate(slots):
        sos += bytes([i + 1, (slot << 4) | slot])
    out += _segment(SOS, sos + b"\x00\x3f\x00")

    codes = {slot: (dc.codes(), ac.codes()) for slot, (dc, ac) in huff.items()}
    w = _BitWriter()
    blocks = [p.coefs.tolist() for p in image.planes]
    preds = [0] * n
    if n == 1:
        dc_codes, ac_codes = codes[0]
        for row in blocks[0]:
            for block in row:
                preds[0] = _encode_block(w, block, preds[0], dc_codes, ac_codes)
    else:
        hmax = max(h for h, _ in sampling)
        vmax = max(v for _, v in sampling)
        mcux = math.ceil(image.width / (8 * hmax))
        mcuy = math.ceil(image.height / (8 * vmax))
        for my in range(mcuy):
            for mx in range(mcux):
                for c, (h, v) in enumerate(sampling):
                    dc_codes, ac_codes = codes[slots[c]]
                    grid = blocks[c]
                    last_r, last_c = len(grid) - 1, len(grid[0]) - 1
                    for by in range(v):
                        r = min(my * v + by, last_r)
                        for bx in range(h):
                            # blocks past the component edge repeat the last real block
                            col = min(mx * h + bx, last_c)
                            preds[c] = _encode_block(w, grid[r][col], preds[c], dc_codes, ac_codes)
    out += w.flush()
    out += b"\xff\xd9"
    return bytes(out)


# -- decoding -------------------------------------------------------------------

class _HuffmanDecoder:
    """16-bit lookahead table: peek 16 bits, index, get (symbol, length)."""

    def __init__(self, spec: HuffmanSpec):
        self.symbol = [0] * 65536
        self.length = [0] * 65536
        for sym, (code, length) in spec.codes().items():
            lo = code << (16 - length)
            hi = (code + 1) << (16 - length)
            self.symbol[lo:hi] = [sym] * (hi - lo)
            self.length[lo:hi] = [length] * (hi - lo)


@dataclass
class _Component:
    ident: int
    h: int
    v: int
    tq: int
    td: int = 0
    ta: int = 0
    blocks: list = field(default_factory=list)


class _Parser:
    def __init__(self, data: bytes):
        self.data = data
        self.qtables = {}
        self.dc_tables = {}
        self.ac_tables = {}
        self.restart_interval = 0
        self.frame = None
        self.components = []

    def fail(self, message, offset):
        raise MalformedBitstream(message, offset)

    def u16(self, pos):
        if pos + 2 > len(self.data):
            self.fail("unexpected end of data", pos)
        return (self.data[pos] << 8) | self.data[pos + 1]

    def parse(self):
        data = self.data
        if data[:2] != b"\xff\xd8":
            self.fail("missing SOI marker", 0)
        pos = 2
        scans = 0
        while True:
            if pos >= len(data):
                self.fail("missing EOI marker", pos)
            if data[pos] != 0xFF:
                self.fail(f"expected a marker, found byte 0x{data[pos]:02x}", pos)
            while pos < len(data) and data[pos] == 0xFF:
                pos += 1
            if pos >= len(data):
                self.fail("truncated marker", pos)
            marker = data[pos]
            pos += 1
            if marker == EOI:
                break
            if RST0 <= marker <= RST0 + 7 or marker == 0x01:
                continue
            seg_start = pos
            length = self.u16(pos)
            if length < 2 or pos + length > len(data):
                self.fail(f"segment 0x{marker:02x} has bad length {length}", pos)
            body = data[pos + 2:pos + length]
            pos += length
            if marker == DQT:
                self._dqt(body, seg_start)
            elif marker == DHT:
                self._dht(body, seg_start)
            elif marker in (SOF0, SOF1):
                self._sof(body, seg_start)
            elif 0xC2 <= marker <= 0xCF and marker not in (DHT, 0xC8, 0xCC):
                self.fail(f"unsupported frame type SOF{marker - 0xC0}", seg_start - 2)
            elif marker == DRI:
                if len(body) != 2:
                    self.fail("bad DRI segment", seg_start)
                self.restart_interval = (body[0] << 8) | body[1]
            elif marker == SOS:
                pos = self._scan(body, seg_start, pos)
                scans += 1
        if self.frame is None or scans == 0:
            self.fail("no frame or scan present", pos)

    def _dqt(self, body, offset):
        i = 0
        while i < len(body):
            pq, tq = body[i] >> 4, body[i] & 15
            i += 1
            size = 128 if pq else 64
            if i + size > len(body) or tq > 3:
                self.fail("bad DQT segment", offset)
            if pq:
                entries = struct.unpack(">64H", body[i:i + 128])
            else:
                entries = tuple(body[i:i + 64])
            try:
                self.qtables[tq] = QuantTable(tuple(entries))
            except ValueError as exc:
                self.fail(f"bad quantization table: {exc}", offset)
            i += size

    def _dht(self, body, offset):
        i = 0
        while i < len(body):
            if i + 17 > len(body):
                self.fail("bad DHT segment", offset)
            tc, th = body[i] >> 4, body[i] & 15
            counts = tuple(body[i + 1:i + 17])
            i += 17
            n = sum(counts)
            if i + n > len(body) or tc > 1 or th > 3:
                self.fail("bad DHT segment", offset)
            spec = HuffmanSpec(counts, tuple(body[i:i + n]))
            i += n
            (self.dc_tables if tc == 0 else self.ac_tables)[th] = _HuffmanDecoder(spec)

    def _sof(self, body, offset):
        if len(body) < 6:
            self.fail("bad SOF segment", offset)
        precision, height, width, n = struct.unpack(">BHHB", body[:6])
        if precision != 8:
            self.fail(f"unsupported sample precision {precision}", offset)
        if height == 0 or width == 0:
            self.fail("zero image dimension", offset)
        if len(body) != 6 + 3 * n or n not in (1, 3):
            self.fail(f"unsupported component count {n}", offset)
        comps = []
        for k in range(n):
            ident, hv, tq = body[6 + 3 * k:9 + 3 * k]
            h, v = hv >> 4, hv & 15
            if not (1 <= h <= 4 and 1 <= v <= 4):
                self.fail("bad sampling factors", offset)
            comps.append(_Component(ident, h, v, tq))
        self.frame = (width, height)
        self.components = comps
        sampling = [(c.h, c.v) for c in comps]
        for c, (_, _, bw, bh) in zip(comps, component_geometry(width, height, sampling)):
            c.blocks = [[None] * bw for _ in range(bh)]

    def _scan(self, body, offset, pos):
        if self.frame is None:
            self.fail("SOS before SOF", offset)
        ns = body[0] if body else 0
        if len(body) != 1 + 2 * ns + 3 or ns < 1:
            self.fail("bad SOS segment", offset)
        by_id = {c.ident: c for c in self.components}
        scomps = []
        for k in range(ns):
            cid, t = body[1 + 2 * k], body[2 + 2 * k]
            if cid not in by_id:
                self.fail(f"scan references unknown component {cid}", offset)
            comp = by_id[cid]
            comp.td, comp.ta = t >> 4, t & 15
            if comp.td not in self.dc_tables or comp.ta not in self.ac_tables:
                self.fail("scan references an undefined Huffman table", offset)
            scomps.append(comp)
        ss, se, a = body[-3], body[-2], body[-1]
        if ss != 0 or se != 63 or a != 0:
            self.fail("not a baseline sequential scan", offset)

        # locate the end of the entropy-coded data and split on restart markers
        data = self.data
        segments = []
        start = pos
        while True:
            i = data.find(b"\xff", pos)
            if i < 0 or i + 1 >= len(data):
                self.fail("entropy-coded data runs past end of file", len(data))
            nxt = data[i + 1]
            if nxt == 0x00 or nxt == 0xFF:
                pos = i + 1
                continue
            if RST0 <= nxt <= RST0 + 7:
                segments.append((start, data[start:i]))
                pos = start = i + 2
                continue
            segments.append((start, data[start:i]))
            end = i
            break

        width, height = self.frame
        if ns == 1:
            comp = scomps[0]
            units = [
                [(comp, r, c)]
                for r in range(len(comp.blocks))
                for c in range(len(comp.blocks[0]))
            ]
        else:
            hmax = max(c.h for c in self.components)
            vmax = max(c.v for c in self.components)
            mcux = math.ceil(width / (8 * hmax))
            mcuy = math.ceil(height / (8 * vmax))
            units = []
            for my in range(mcuy):
                for mx in range(mcux):
                    mcu = []
                    for comp in scomps:
                        for by in range(comp.v):
                            for bx in range(comp.h):
                                mcu.append((comp, my * comp.v + by, mx * comp.h + bx))
                    units.append(mcu)

        ri = self.restart_interval or len(units)
        chunks = [units[i:i + ri] for i in range(0, len(units), ri)]
        if len(chunks) > len(segments):
            self.fail(
                f"expected {len(chunks)} restart intervals, found {len(segments)}", end
            )
        for (seg_offset, raw), chunk in zip(segments, chunks):
            self._decode_interval(raw, seg_offset, chunk)
        return end

    def _decode_interval(self, raw, offset, units):
        buf = raw.replace(b"\xff\x00", b"\xff") + b"\x00\x00\x00\x00"
        nbits_total = (len(buf) - 4) * 8
        pos = 0
        preds = {}
        from_bytes = int.from_bytes
        for mcu in units:
            for comp, r, c in mcu:
                dct = self.dc_tables[comp.td]
                act = self.ac_tables[comp.ta]
                block = [0] * 64
                # DC
                p = pos >> 3
                peek = (from_bytes(buf[p:p + 3], "big") >> (8 - (pos & 7))) & 0xFFFF
                length = dct.length[peek]
                if not length:
                    self.fail("invalid DC Huffman code", offset + (pos >> 3))
                cat = dct.symbol[peek]
                pos += length
                diff = 0
                if cat:
                    if cat > 11:
                        self.fail("DC category above 11", offset + (pos >> 3))
                    p = pos >> 3
                    bits = (from_bytes(buf[p:p + 4], "big") >> (32 - (pos & 7) - cat)) & ((1 << cat) - 1)
                    pos += cat
                    diff = bits if bits >> (cat - 1) else bits - (1 << cat) + 1
                dc = preds.get(comp.ident, 0) + diff
                preds[comp.ident] = dc
                block[0] = dc
                # AC
                k = 1
                while k < 64:
                    p = pos >> 3
                    peek = (from_bytes(buf[p:p + 3], "big") >> (8 - (pos & 7))) & 0xFFFF
                    length = act.length[peek]
                    if not length:
                        self.fail("invalid AC Huffman code", offset + (pos >> 3))
                    rs = act.symbol[peek]
                    pos += length
                    run, cat = rs >> 4, rs & 15
                    if cat == 0:
                        if run == 15:
                            k += 16
                            continue
                        break
                    k += run
                    if k > 63:
                        self.fail("AC run past the end of the block", offset + (pos >> 3))
                    p = pos >> 3
                    bits = (from_bytes(buf[p:p + 4], "big") >> (32 - (pos & 7) - cat)) & ((1 << cat) - 1)
                    pos += cat
                    block[k] = bits if bits >> (cat - 1) else bits - (1 << cat) + 1
                    k += 1
                if k > 64:
                    self.fail("zero run past the end of the block", offset + (pos >> 3))
                if pos > nbits_total:
                    self.fail("entropy-coded data ended mid-block", offset + len(raw))
                if r < len(comp.blocks) and c < len(comp.blocks[0]):
                    comp.blocks[r][c] = block

    def result(self) -> CoefficientImage:
        width, height = self.frame
        sampling = tuple((c.h, c.v) for c in self.components)
        geometry = component_geometry(width, height, sampling)
        names = COMPONENT_NAMES if len(self.components) == 3 else ("Y",)
        planes, qtables = [], []
        for comp, name, (cw, ch, _, _) in zip(self.components, names, geometry):
            if any(b is None for row in comp.blocks for b in row):
                raise MalformedBitstream(f"component {name} is missing blocks")
            if comp.tq not in self.qtables:
                raise MalformedBitstream(f"component {name} uses undefined quantization table {comp.tq}")
            coefs = np.array(comp.blocks, dtype=np.int32)
            planes.append(CoefficientPlane(name, coefs, cw, ch))
            qtables.append(self.qtables[comp.tq])
        return CoefficientImage(width, height, planes, qtables, sampling)


def decode_jpeg(data: bytes) -> CoefficientImage:
    """Parse a baseline JPEG down to its quantized coefficients."""
    parser = _Parser(bytes(data))
    try:
        parser.parse()
    except MalformedBitstream:
        raise
    except (IndexError, struct.error, ValueError) as exc:
        raise MalformedBitstream(f"corrupt stream: {exc}") from exc
    return parser.result()


def natural_order(coefs) -> np.ndarray:
    """Zigzag-ordered (..., 64) coefficients as (..., 8, 8) natural-order blocks."""
    coefs = np.asarray(coefs)
    return coefs[..., UNZIGZAG].reshape(*coefs.shape[:-1], 8, 8)


def zigzag_order(blocks) -> np.ndarray:
    blocks = np.asarray(blocks)
    return blocks.reshape(*blocks.shape[:-2], 64)[..., ZIGZAG]


def probe_jpeg(data: bytes):
    """(width, height, components) from the frame header, without decoding scans."""
    data = bytes(data)
    if data[:2] != b"\xff\xd8":
        raise MalformedBitstream("missing SOI marker", 0)
    pos = 2
    while pos + 4 <= len(data):
        if data[pos] != 0xFF:
            raise MalformedBitstream(f"expected a marker, found byte 0x{data[pos]:02x}", pos)
        marker = data[pos + 1]
        if marker == 0xFF:
            pos += 1
            continue
        length = (data[pos + 2] << 8) | data[pos + 3]
        if marker in (SOF0, SOF1) or (0xC2 <= marker <= 0xCF and marker not in (DHT, 0xC8, 0xCC)):
            if pos + 4 + length - 2 > len(data) or length < 8:
                raise MalformedBitstream("truncated frame header", pos)
            _, height, width, n = struct.unpack(">BHHB", data[pos + 4:pos + 10])
            return width, height, n
        if marker in (SOS, EOI):
            break
        pos += 2 + length
    raise MalformedBitstream("no frame header found", pos)

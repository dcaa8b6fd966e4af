import numpy as np
import numpy.testing as npt
import pytest

from gdposr.imagecore import Image, PnmParseError, load_image, save_image


def test_p5_2x2_known_bytes(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    img = load_image(p)
    assert (img.height, img.width, img.channels) == (2, 2, 1)
    npt.assert_array_equal(img.pixels[:, :, 0],
                           np.array([[0, 255], [128, 64]]) / 255.0)


def test_p6_roundtrip_within_one_quantization_step(tmp_path):
    rng = np.random.default_rng(5)
    img = Image(rng.random((7, 9, 3)))
    p = tmp_path / "t.ppm"
    save_image(img, p)
    back = load_image(p)
    assert np.abs(back.pixels - img.pixels).max() <= 1.0 / 255.0


def test_p5_roundtrip_exact_on_quantized_values(tmp_path):
    img = Image(np.arange(16).reshape(4, 4, 1) / 255.0)
    p = tmp_path / "t.pgm"
    save_image(img, p)
    npt.assert_array_equal(load_image(p).pixels, img.pixels)


def test_maxval_other_than_255_rejected(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
    with pytest.raises(PnmParseError, match="maxval"):
        load_image(p)


def test_bad_magic_rejected(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
    with pytest.raises(PnmParseError, match="magic"):
        load_image(p)


def test_truncated_payload_reports_offset(tmp_path):
    p = tmp_path / "t.pgm"
    data = b"P5\n4 4\n255\n" + bytes(7)  # needs 16 payload bytes
    p.write_bytes(data)
    with pytest.raises(PnmParseError) as exc:
        load_image(p)
    assert "truncated" in str(exc.value)
    assert exc.value.offset == len(data)


def test_header_comments_are_skipped(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5 # magic\n# a comment line\n2 1 # dims\n255\n" + bytes([10, 20]))
    img = load_image(p)
    npt.assert_allclose(img.pixels[:, :, 0], np.array([[10, 20]]) / 255.0)


def test_garbage_width_reports_offset(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5\nxx 2\n255\n" + bytes(4))
    with pytest.raises(PnmParseError, match="width"):
        load_image(p)

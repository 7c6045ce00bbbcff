import math

import mrcfile
import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.model.phantom import PhantomSpec
from src.model.rotation import Rotation
from src.model.volume import Volume, grid_coordinates
from src.volio.metrics import geodesic_degrees, shift_error
from src.volio.mrc import BadMapStampError, ShortReadError, UnsupportedModeError, VolumeShapeError, read_mrc, read_mrc_header, write_mrc
from src.volio.phantom import make_phantom, read_truth, support_mask, write_truth
from src.volio.transforms import rotate_volume, shift_volume


@pytest.fixture
def written(tmp_path, rng):
    data = rng.standard_normal((8, 8, 8)).astype(np.float32).astype(np.float64)
    volume = Volume(data=data, voxel_size=2.5)
    path = tmp_path / "volume.mrc"
    write_mrc(volume, path)
    return volume, path


def _patch(path, offset: int, payload: bytes) -> None:
    with open(path, "r+b") as f:
        f.seek(offset)
        f.write(payload)


def test_round_trip_is_exact(written):
    volume, path = written
    back = read_mrc(path)
    assert np.array_equal(back.data, volume.data)
    assert back.voxel_size == pytest.approx(2.5)


def test_header_layout(written):
    volume, path = written
    raw = path.read_bytes()
    assert raw[208:212] == b"MAP "
    assert np.frombuffer(raw[:16], dtype="<i4").tolist() == [8, 8, 8, 2]
    header = read_mrc_header(path)
    assert (header.nx, header.ny, header.nz, header.mode) == (8, 8, 8, 2)
    assert_allclose(header.dmean, volume.data.mean(), atol=1e-5)
    assert_allclose(header.dmax, volume.data.max(), atol=1e-6)
    assert header.voxel_size == pytest.approx(2.5)


def test_tiny_zero_volume(tmp_path):
    path = tmp_path / "zeros.mrc"
    write_mrc(Volume(data=np.zeros((4, 4, 4))), path)
    back = read_mrc(path)
    assert back.n == 4
    assert np.all(back.data == 0.0)


def test_truncated_payload(written):
    _, path = written
    raw = path.read_bytes()
    path.write_bytes(raw[:-100])
    with pytest.raises(ShortReadError):
        read_mrc(path)


def test_file_shorter_than_header(tmp_path):
    path = tmp_path / "short.mrc"
    path.write_bytes(b"\x00" * 500)
    with pytest.raises(ShortReadError):
        read_mrc_header(path)


def test_bad_map_stamp(written):
    _, path = written
    _patch(path, 208, b"ABCD")
    with pytest.raises(BadMapStampError):
        read_mrc(path)


def test_unsupported_mode(written):
    _, path = written
    _patch(path, 12, np.array([4], dtype="<i4").tobytes())
    with pytest.raises(UnsupportedModeError):
        read_mrc(path)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_mrc(tmp_path / "absent.mrc")


def test_non_cubic_volume(tmp_path):
    path = tmp_path / "slab.mrc"
    with mrcfile.new(path) as mrc:
        mrc.set_data(np.zeros((4, 4, 6), dtype=np.float32))
    with pytest.raises(VolumeShapeError):
        read_mrc(path)


def test_shift_moves_voxels():
    data = np.zeros((8, 8, 8))
    data[3, 4, 5] = 1.0
    moved = shift_volume(Volume(data=data), (1, -2, 0))
    assert moved.data[3, 2, 6] == 1.0
    assert moved.data.sum() == 1.0


def test_rotation_about_z_maps_x_onto_y():
    data = np.zeros((8, 8, 8))
    # voxel at x = 0.5, y = z = 0
    data[4, 4, 6] = 1.0
    rotated = rotate_volume(Volume(data=data), Rotation.from_axis_angle((0.0, 0.0, 1.0), math.pi / 2))
    assert_allclose(rotated.data[4, 6, 4], 1.0, atol=1e-9)
    assert_allclose(rotated.data.sum(), 1.0, atol=1e-9)


def test_geodesic_distance():
    g = Rotation.from_euler(0.3, 1.2, -0.8)
    assert geodesic_degrees(g, g) == pytest.approx(0.0, abs=1e-6)
    about_z = Rotation.from_axis_angle((0.0, 0.0, 1.0), math.radians(30.0))
    assert geodesic_degrees(Rotation.identity(), about_z) == pytest.approx(30.0)
    other = Rotation.from_euler(1.0, 0.4, 2.0)
    assert geodesic_degrees(g, other) == pytest.approx(geodesic_degrees(other, g))
    assert geodesic_degrees(Rotation.identity(), Rotation.from_axis_angle((1.0, 0.0, 0.0), math.pi)) == pytest.approx(180.0)
    assert shift_error((2, 0, -1), (1, 0, 1)) == (1, 0, -2)


def test_phantom_is_deterministic():
    spec = PhantomSpec(n=16, seed=7, true_rotation=Rotation.from_euler(0.2, 0.5, 0.9), true_shift=(1, 0, 0), snr=5.0)
    first = make_phantom(spec)
    second = make_phantom(spec)
    assert np.array_equal(first[0].data, second[0].data)
    assert np.array_equal(first[1].data, second[1].data)
    assert first[2] == second[2]
    different = make_phantom(spec.model_copy(update={"seed": 8}))
    assert not np.array_equal(first[0].data, different[0].data)


def test_template_stays_inside_the_ball():
    template, _, _ = make_phantom(PhantomSpec(n=32, seed=2))
    x, y, z = grid_coordinates(32)
    outside = x**2 + y**2 + z**2 > 1.0
    assert np.max(np.abs(template.data[outside])) < 1e-2 * np.max(template.data)
    assert support_mask(32, 0.8).sum() < (32**3)


def test_noise_matches_requested_snr():
    base = PhantomSpec(n=32, seed=4, true_rotation=Rotation.from_euler(0.4, 0.7, 0.1))
    _, clean, _ = make_phantom(base)
    _, noisy, truth = make_phantom(base.model_copy(update={"snr": 2.0}))
    noise = noisy.data - clean.data
    signal_variance = np.var(clean.data[support_mask(32, base.support_radius)])
    assert_allclose(np.var(noise), signal_variance / 2.0, rtol=0.05)
    assert truth.snr == 2.0


def test_wedge_is_applied_to_the_subtomogram():
    base = PhantomSpec(n=16, seed=1)
    template, plain, _ = make_phantom(base)
    _, filtered, truth = make_phantom(base.model_copy(update={"wedge_theta": 45.0}))
    assert_allclose(plain.data, rotate_volume(template, Rotation.identity()).data)
    assert np.linalg.norm(filtered.data) < np.linalg.norm(plain.data)
    assert truth.wedge_theta == 45.0


def test_truth_round_trip(tmp_path):
    rotation = Rotation.from_euler_degrees(10.0, 80.0, -45.0)
    _, _, truth = make_phantom(PhantomSpec(n=16, seed=3, true_rotation=rotation, true_shift=(0, -2, 1)))
    path = tmp_path / "out" / "truth.json"
    write_truth(truth, path)
    back = read_truth(path)
    assert back == truth
    assert_allclose(np.linalg.norm(back.quaternion), 1.0)
    assert geodesic_degrees(back.rotation(), rotation) < 1e-9
    assert geodesic_degrees(back.expected_alignment(), rotation.inverse()) < 1e-9
    with pytest.raises(FileNotFoundError):
        read_truth(tmp_path / "missing.json")

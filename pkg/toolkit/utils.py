"""
Artifact writers: every CSV, JSON and SVG file starts with a provenance
header carrying the tool version, the resolved run config and the seed.
"""
import csv
import json
import logging
import math
from pathlib import Path

import matplotlib
import numpy as np
from django.conf import settings

matplotlib.use('Agg')
matplotlib.rcParams['svg.hashsalt'] = 'dynamics'

from matplotlib import pyplot as plt  # noqa: E402

logger = logging.getLogger(__name__)

PROJECTIONS = {'xy': (0, 1), 'xz': (0, 2), 'yz': (1, 2)}


def provenance(config):
    return {
        'tool': 'spiral-chaos-toolkit',
        'version': settings.TOOL_VERSION,
        'seed': config.get('seed', settings.DYNAMICS['SEED']),
        'config': config,
    }


def _plain(value):
    """JSON-safe copy: numpy scalars and arrays unpacked, non-finite floats as null."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return [_plain(value.real), _plain(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dumps(payload):
    return json.dumps(_plain(payload), indent=2, sort_keys=False)


def out_dir(path=None):
    directory = Path(path or settings.DYNAMICS['OUT_DIR'])
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def write_json(path, payload, config):
    path = Path(path)
    path.write_text(dumps({'provenance': provenance(config), **payload}) + '\n')
    logger.info(f'Wrote {path}')
    return path


def write_csv(path, header, rows, config):
    path = Path(path)
    with path.open('w', newline='') as handle:
        handle.write(f'# {json.dumps(_plain(provenance(config)))}\n')
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    logger.info(f'Wrote {path}')
    return path


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return '' if value is None else value


def read_csv(path):
    """Header and float rows of a CSV written by write_csv."""
    with Path(path).open() as handle:
        lines = [line for line in handle if not line.startswith('#')]
    reader = csv.reader(lines)
    header = next(reader)
    rows = [[float(v) if v else math.nan for v in row] for row in reader if row]
    return header, np.array(rows, dtype=float).reshape(-1, len(header))


def _save_svg(fig, path, config):
    path = Path(path)
    fig.savefig(path, format='svg', metadata={
        'Date': None,
        'Description': json.dumps(_plain(provenance(config))),
    })
    plt.close(fig)
    logger.info(f'Wrote {path}')
    return path


def plot_projection(path, states, proj, config, title=''):
    """Polyline projection of a trajectory onto two coordinates."""
    i, j = PROJECTIONS[proj]
    states = np.asarray(states)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.plot(states[:, i], states[:, j], lw=0.4, color='black')
    ax.set_xlabel(proj[0])
    ax.set_ylabel(proj[1])
    ax.set_title(title)
    return _save_svg(fig, path, config)


def plot_points(path, states, proj, config, title=''):
    """Scatter projection for map orbits."""
    i, j = PROJECTIONS[proj]
    states = np.asarray(states)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.scatter(states[:, i], states[:, j], s=0.2, color='black', marker='.')
    ax.set_xlabel(proj[0])
    ax.set_ylabel(proj[1])
    ax.set_title(title)
    return _save_svg(fig, path, config)


def plot_fan(path, runs, proj, config, title=''):
    i, j = PROJECTIONS[proj]
    fig, ax = plt.subplots(figsize=(6, 6))
    for run in runs:
        states = run.states
        ax.plot(states[:, i], states[:, j], lw=0.3, color='black')
    ax.set_xlabel(proj[0])
    ax.set_ylabel(proj[1])
    ax.set_title(title)
    return _save_svg(fig, path, config)


def plot_diagram(path, pairs, varying, config, title=''):
    """Bifurcation diagram: sampled coordinate against the varied parameter."""
    pairs = np.asarray(pairs, dtype=float).reshape(-1, 2)
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.scatter(pairs[:, 0], pairs[:, 1], s=0.2, color='black', marker='.')
    ax.set_xlabel(varying)
    ax.set_ylabel('x')
    ax.set_title(title)
    return _save_svg(fig, path, config)

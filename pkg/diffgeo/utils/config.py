"""
Configuration management for DiffGeo
Handles environment variables, solver defaults, and configuration validation
"""

import os
from pathlib import Path
from typing import Dict, Any, Optional
import logging

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    logging.warning("python-dotenv not available - using environment variables only")


def _env_float(name: str, default: str) -> float:
    return float(os.getenv(name, default))


def _env_int(name: str, default: str) -> int:
    return int(os.getenv(name, default))


class Config:
    """Configuration manager for DiffGeo computations"""

    def __init__(self, config_file: Optional[str] = None):
        """Initialize configuration with default values"""

        # Load from environment file if specified
        if config_file and Path(config_file).exists():
            try:
                from dotenv import load_dotenv
                load_dotenv(config_file, override=True)
            except ImportError:
                pass

        # Eigensolver settings
        self.tol = _env_float('DIFFGEO_TOL', '1e-10')
        self.max_iters = _env_int('DIFFGEO_MAX_ITERS', '200000')
        self.refine_threshold = _env_float('DIFFGEO_REFINE_THRESHOLD', '1e-4')

        # Diffusion distance settings
        self.kmax_factor = _env_int('DIFFGEO_KMAX_FACTOR', '50')
        self.threshold_p = _env_float('DIFFGEO_THRESHOLD_P', '0.5')

        # Bound checks
        self.slack_tol = _env_float('DIFFGEO_SLACK_TOL', '1e-9')

        # Randomness and parallelism
        self.seed = _env_int('DIFFGEO_SEED', '0')
        self.threads = _env_int('DIFFGEO_THREADS', '1')
        self.mc_walkers = _env_int('DIFFGEO_MC_WALKERS', '100000')

        # Graphs above this many stored edges are swept through their lumped chain
        self.lump_nnz_limit = _env_int('DIFFGEO_LUMP_NNZ_LIMIT', '2000000')

        # Output
        self.out_dir = Path(os.getenv('DIFFGEO_OUT_DIR', 'results'))
        self.output_format = os.getenv('DIFFGEO_FORMAT', 'csv').lower()

        # Logging
        self.log_level = os.getenv('LOG_LEVEL', 'INFO').upper()
        self.log_file = os.getenv('LOG_FILE', '')

        # Validate configuration
        self._validate_config()

    def _validate_config(self):
        """Validate configuration values"""
        if not (0 < self.tol <= 1e-4):
            logging.warning(f"Eigen tolerance {self.tol} out of range, using 1e-10")
            self.tol = 1e-10

        if self.max_iters < 1:
            logging.warning("max_iters must be positive, using 200000")
            self.max_iters = 200000

        if not (0 < self.refine_threshold < 1):
            logging.warning("Refinement threshold out of range, using 1e-4")
            self.refine_threshold = 1e-4

        if self.kmax_factor < 1:
            logging.warning("kmax factor too low, setting to 1")
            self.kmax_factor = 1

        if not (0 < self.threshold_p < 1):
            logging.warning(f"Threshold p={self.threshold_p} outside (0, 1), using 0.5")
            self.threshold_p = 0.5

        if self.slack_tol < 0:
            logging.warning("Negative slack tolerance, using 1e-9")
            self.slack_tol = 1e-9

        if self.threads < 1:
            logging.warning("Thread count must be at least 1, using 1")
            self.threads = 1

        if self.mc_walkers < 1:
            logging.warning("Walker count must be at least 1, using 100000")
            self.mc_walkers = 100000

        if self.seed < 0 or self.seed >= 2 ** 64:
            logging.warning("Seed must be a 64-bit unsigned integer, using 0")
            self.seed = 0

        if self.output_format not in ('json', 'csv'):
            logging.warning(f"Invalid output format '{self.output_format}', using csv")
            self.output_format = 'csv'

        valid_log_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        if self.log_level not in valid_log_levels:
            logging.warning(f"Invalid log level '{self.log_level}', using INFO")
            self.log_level = 'INFO'

    def default_kmax(self, n: int) -> int:
        """Default diffusion horizon for an n-vertex graph"""
        return self.kmax_factor * max(n, 1)

    def get_log_path(self) -> Optional[str]:
        """Get the log file path, or None when logging to stderr only"""
        return self.log_file or None

    def get_solver_settings(self) -> Dict[str, Any]:
        """Get eigensolver settings"""
        return {
            'tol': self.tol,
            'max_iters': self.max_iters,
            'refine_threshold': self.refine_threshold
        }

    def get_diffusion_settings(self) -> Dict[str, Any]:
        """Get diffusion distance settings"""
        return {
            'kmax_factor': self.kmax_factor,
            'threshold_p': self.threshold_p,
            'mc_walkers': self.mc_walkers
        }

    def update_setting(self, key: str, value: Any) -> bool:
        """Update a configuration setting"""
        if not hasattr(self, key):
            logging.warning(f"Unknown setting: {key}")
            return False
        if key == 'out_dir':
            value = Path(value)
        setattr(self, key, value)
        self._validate_config()
        logging.getLogger(__name__).debug(f"Updated setting {key} to {value}")
        return True

    def export_config(self) -> Dict[str, Any]:
        """Export current configuration as plain values"""
        config_dict = {}
        config_dict.update(self.get_solver_settings())
        config_dict.update(self.get_diffusion_settings())
        config_dict.update({
            'slack_tol': self.slack_tol,
            'seed': self.seed,
            'threads': self.threads,
            'lump_nnz_limit': self.lump_nnz_limit,
            'output_format': self.output_format
        })
        return config_dict

    def __str__(self) -> str:
        """String representation of configuration"""
        config = self.export_config()
        return f"DiffGeoConfig({', '.join(f'{k}={v}' for k, v in config.items())})"

    def __repr__(self) -> str:
        return self.__str__()


# Global configuration instance
config = Config()

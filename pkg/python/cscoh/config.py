"""
cscoh configuration management
Output format, log level and check switches, read from .cscoh/config.yaml and
CSCOH_* environment variables.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class OutputFormat(Enum):
    """Report formats"""
    TEXT = "text"
    JSON = "json"


@dataclass
class EngineConfig:
    """Everything the CLI and engine read from configuration"""
    output_format: OutputFormat = OutputFormat.TEXT
    log_level: str = "WARNING"
    text_width: int = 100
    star_checks: bool = True
    minkowski_checks: bool = True
    spec_paths: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        result = asdict(self)
        result['output_format'] = self.output_format.value
        return result

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EngineConfig':
        """Create from dictionary; unknown keys are ignored"""
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        if 'output_format' in known:
            known['output_format'] = OutputFormat(known['output_format'])
        if 'spec_paths' in known:
            known['spec_paths'] = [str(p) for p in known['spec_paths'] or []]
        return cls(**known)


def _parse_bool(text: str) -> Optional[bool]:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    return None


class ConfigManager:
    """Loads, validates and saves cscoh configuration"""

    def __init__(self, config_path: Optional[str] = None, project_root: Optional[str] = None):
        self.project_root = Path(project_root or Path.cwd())
        self.config_path = Path(config_path) if config_path else self._get_default_config_path()
        self._config: Optional[EngineConfig] = None
        self._config_loaded = False

    def _get_default_config_path(self) -> Path:
        """Project config if present, else the one in the home directory"""
        project_config = self.project_root / '.cscoh' / 'config.yaml'
        if project_config.exists():
            return project_config
        return Path.home() / '.cscoh' / 'config.yaml'

    def load_config(self) -> EngineConfig:
        """Load configuration from file, falling back to defaults"""
        if self._config_loaded and self._config:
            return self._config

        try:
            if self.config_path.exists():
                with open(self.config_path, 'r') as f:
                    if self.config_path.suffix.lower() in ['.yaml', '.yml']:
                        data = yaml.safe_load(f)
                    else:
                        data = json.load(f)
                self._config = EngineConfig.from_dict(data or {})
            else:
                self._config = self._create_default_config()
        except Exception as e:
            logger.warning("error loading config from %s: %s", self.config_path, e)
            self._config = self._create_default_config()

        self._config_loaded = True
        return self._config

    def _create_default_config(self) -> EngineConfig:
        return EngineConfig()

    def save_config(self, config: Optional[EngineConfig] = None) -> bool:
        """Write configuration as YAML or JSON, by file suffix"""
        if config is None:
            config = self._config
        if config is None:
            return False

        try:
            self.config_path.parent.mkdir(parents=True, exist_ok=True)
            data = config.to_dict()
            with open(self.config_path, 'w') as f:
                if self.config_path.suffix.lower() in ['.yaml', '.yml']:
                    yaml.safe_dump(data, f, default_flow_style=False, indent=2)
                else:
                    json.dump(data, f, indent=2)
            logger.info("configuration saved to %s", self.config_path)
            return True
        except Exception as e:
            logger.error("error saving configuration: %s", e)
            return False

    def validate_config(self) -> Tuple[bool, List[str]]:
        """Validate the current configuration"""
        config = self.load_config()
        issues = []

        if config.log_level.upper() not in LOG_LEVELS:
            issues.append(f"log_level {config.log_level!r} is not one of {', '.join(LOG_LEVELS)}")
        if config.text_width < 40:
            issues.append(f"text_width {config.text_width} is below 40")
        for path in config.spec_paths:
            if not Path(path).is_dir():
                issues.append(f"spec path {path} is not a directory")

        return len(issues) == 0, issues

    def update_from_environment(self):
        """Apply CSCOH_* environment variables; malformed values are ignored"""
        config = self.load_config()

        output_format = os.getenv('CSCOH_FORMAT')
        if output_format:
            try:
                config.output_format = OutputFormat(output_format.lower())
            except ValueError:
                logger.warning("ignoring CSCOH_FORMAT=%s", output_format)

        log_level = os.getenv('CSCOH_LOG_LEVEL')
        if log_level:
            config.log_level = log_level.upper()

        width = os.getenv('CSCOH_TEXT_WIDTH')
        if width:
            try:
                config.text_width = int(width)
            except ValueError:
                logger.warning("ignoring CSCOH_TEXT_WIDTH=%s", width)

        star_checks = os.getenv('CSCOH_STAR_CHECKS')
        if star_checks:
            parsed = _parse_bool(star_checks)
            if parsed is not None:
                config.star_checks = parsed

        minkowski_checks = os.getenv('CSCOH_MINKOWSKI_CHECKS')
        if minkowski_checks:
            parsed = _parse_bool(minkowski_checks)
            if parsed is not None:
                config.minkowski_checks = parsed

        self._config = config

    def create_sample_config(self) -> str:
        """Sample configuration file content"""
        sample_config = {
            'output_format': 'text',
            'log_level': 'WARNING',
            'text_width': 100,
            'star_checks': True,
            'minkowski_checks': True,
            'spec_paths': ['./specs'],
        }
        return yaml.safe_dump(sample_config, default_flow_style=False, indent=2)


_config_manager: Optional[ConfigManager] = None


def get_config_manager(project_root: Optional[str] = None) -> ConfigManager:
    """Global configuration manager instance"""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager(project_root=project_root)
    return _config_manager


def reset_config_manager():
    """Reset the global configuration manager (for testing)"""
    global _config_manager
    _config_manager = None

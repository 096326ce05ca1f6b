"""Exception hierarchy shared across the package."""


class CountergenError(Exception):
    """Base class for all package errors."""


class SchemaError(CountergenError):
    """An input file does not match its declared schema."""


class ConfigError(CountergenError):
    """A run configuration file or flag set is invalid."""


class TransportError(CountergenError):
    """A network call failed after exhausting its retry budget."""


class GenerationError(CountergenError):
    """An LLM call produced no usable completion."""


class ExtractionError(CountergenError):
    """The external entity tagger could not be reached."""


class CriticError(CountergenError):
    """A model-backed critic could not produce a critique."""


class ProtocolError(CountergenError):
    """A service reply violated its wire contract."""


class PromptError(CountergenError):
    """A prompt could not be rendered within the configured budget."""


class MetricError(CountergenError):
    """A metric could not be computed for a response."""

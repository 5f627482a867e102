from pydantic import BaseModel, ConfigDict
from stringcase import camelcase


class HyfiModel(BaseModel):
    """Base model for every configuration and report document.

    Fields are snake_case in python and camelCase on disk; both spellings are
    accepted when reading.
    """

    model_config = ConfigDict(
        alias_generator=camelcase,
        populate_by_name=True,
        protected_namespaces=(),
        extra="forbid",
    )

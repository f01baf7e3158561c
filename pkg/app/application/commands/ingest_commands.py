from typing import List, Optional

from pydantic import BaseModel, field_validator


class IngestCommand(BaseModel):
    input_path: str
    columns: List[str]
    output_path: Optional[str] = None

    @field_validator("columns")
    @classmethod
    def check_columns(cls, columns: List[str]) -> List[str]:
        columns = [c.strip() for c in columns if c.strip()]
        if not columns:
            raise ValueError("select at least one column")
        return columns

from typing import Optional

from pydantic import BaseModel, Field

from app.domain.ci_test.schemas import TestOptions
from app.domain.families.schemas import PsdFamily


class RunTestCommand(BaseModel):
    input_path: str
    family: PsdFamily
    options: TestOptions = Field(default_factory=TestOptions)
    include_boot: bool = True
    output_path: Optional[str] = None

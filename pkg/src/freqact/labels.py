from __future__ import annotations

import enum


class Activity(enum.Enum):
    REST = "rest"
    WALK = "walk"
    RUN = "run"
    MISC = "misc"

    @classmethod
    def from_token(cls, token: str) -> "Activity":
        """Case-insensitive lookup; raises ``KeyError`` on unknown tokens."""
        t = token.strip().lower()
        if t == "miscellaneous":
            t = "misc"
        for member in cls:
            if member.value == t:
                return member
        raise KeyError(token)

    def __str__(self) -> str:
        return self.value


# Row/column order of confusion matrices.
ORDER = (Activity.REST, Activity.WALK, Activity.RUN, Activity.MISC)

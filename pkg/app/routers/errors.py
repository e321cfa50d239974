from contextlib import contextmanager
from typing import Iterator

from fastapi import HTTPException, status
from pydantic import ValidationError

from app.exceptions import InvalidParameterError, NumericalFailure


@contextmanager
def domain_errors() -> Iterator[None]:
    """
    Maps package exceptions onto HTTP errors.
    """
    try:
        yield
    except InvalidParameterError as error:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST, detail=str(error)
        ) from error
    except ValidationError as error:
        raise HTTPException(
            status_code=422,
            detail=error.errors(
                include_url=False, include_context=False, include_input=False
            ),
        ) from error
    except NumericalFailure as error:
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(error)
        ) from error

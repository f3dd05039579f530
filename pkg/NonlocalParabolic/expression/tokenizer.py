# Tokenizer
import re
from dataclasses import dataclass


class ExpressionError(ValueError):
    """Base class of every error raised while parsing or evaluating an expression"""


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message, offset):
        """
        @message: str, what went wrong
        @offset: int, byte offset in the source text
        """
        super().__init__(f'{message} (at byte {offset})')
        self.offset = offset


class UnknownIdentifierError(ExpressionError):
    def __init__(self, name, offset):
        super().__init__(f'unknown identifier "{name}" (at byte {offset})')
        self.name = name
        self.offset = offset


class ArityError(ExpressionError):
    def __init__(self, name, expected, got, offset):
        super().__init__(f'{name}() takes {expected} argument(s), {got} given (at byte {offset})')
        self.name = name
        self.offset = offset


@dataclass(frozen=True)
class Token:
    kind: str  # 'number', 'name', 'op', '(', ')', ',', 'end'
    text: str
    offset: int


_TOKEN_PATTERN = re.compile(r"""
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^])
  | (?P<punct>[(),])
""", re.VERBOSE)


def _byte_offset(source, index):
    return len(source[:index].encode('utf-8'))


def tokenize(source: str) -> list:
    """
    Split an expression into tokens. The last token is always of kind 'end'.
    """
    tokens = []
    index = 0
    while index < len(source):
        match = _TOKEN_PATTERN.match(source, index)
        if match is None:
            raise ExpressionSyntaxError(f'unexpected character "{source[index]}"', _byte_offset(source, index))
        kind = match.lastgroup
        text = match.group(kind)
        if kind == 'punct':
            kind = text
        if kind != 'space':
            tokens.append(Token(kind, text, _byte_offset(source, index)))
        index = match.end()
    tokens.append(Token('end', '', _byte_offset(source, len(source))))
    return tokens

"""Hand-computed expected values, frozen before the parsers were written.

Each money row was worked out on paper from the separator rules: with both
separators present the rightmost is decimal; a single separator followed by
exactly three digits after a 1-3 digit leading group (other than a bare 0)
groups thousands, otherwise it is the decimal point. The policy default
currency for the table is USD.
"""

MONEY_TABLE = [
    ("1,234.56", 123456, 2, "USD"),
    ("1.234,56 €", 123456, 2, "EUR"),
    ("(100.00)", -10000, 2, "USD"),
    ("€ 99", 99, 0, "EUR"),
    ("1234", 1234, 0, "USD"),
    ("12,34 EUR", 1234, 2, "EUR"),
    ("-0.50", -50, 2, "USD"),
    ("$1,000", 1000, 0, "USD"),
    ("1 234,56", 123456, 2, "USD"),
    ("1'234.56 CHF", 123456, 2, "CHF"),
    ("0.005", 5, 3, "USD"),
    ("10.000", 10000, 0, "USD"),
    ("£12.50", 1250, 2, "GBP"),
    ("USD 42.00", 4200, 2, "USD"),
    ("7", 7, 0, "USD"),
    ("-1.234,00", -123400, 2, "USD"),
    ("3.14159", 314159, 5, "USD"),
    ("¥500", 500, 0, "UNKNOWN"),
    ("1,234,567.89", 123456789, 2, "USD"),
    ("1.234", 1234, 0, "USD"),
]

# (raw, date_order, expected (y, m, d))
DATE_TABLE = [
    ("2024-02-01", "day_first", (2024, 2, 1)),
    ("01.02.2024", "day_first", (2024, 2, 1)),
    ("01.02.2024", "month_first", (2024, 1, 2)),
    ("1/2/24", "day_first", (2024, 2, 1)),
    ("31-12-69", "day_first", (1969, 12, 31)),
    ("01-01-68", "day_first", (2068, 1, 1)),
    ("02 Jan 2024", "day_first", (2024, 1, 2)),
    ("January 2, 2024", "day_first", (2024, 1, 2)),
    ("Feb 29 2024", "day_first", (2024, 2, 29)),
    ("2024/02/01", "day_first", (2024, 2, 1)),
    ("24/02/01", "year_first", (2024, 2, 1)),
]

DATE_ERRORS = ["13/13/2024", "2023-02-29", "29 Feb 2023", "hello", "1/2", ""]

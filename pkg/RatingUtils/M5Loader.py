"""
Loads the public M5 competition files into a SeriesPanel.

Expected in the directory:
    calendar.csv                   one row per day: date, d (d_1 ...), wday, ...
    sales_train_evaluation.csv     one row per series: id, item_id, dept_id, cat_id,
                                   store_id, state_id, d_1 ... d_1941
sales_train_validation.csv (days up to d_1913) is used when the evaluation file is absent.
"""
# -*- coding: utf-8 -*-

import logging
import os
import re

import numpy as np
import pandas as pd

from ForecastRating.RatingErrors import MissingFile, SchemaMismatch
from .SyntheticData import SeriesPanel

logger = logging.getLogger(__name__)

CALENDAR_FILE = "calendar.csv"
SALES_FILES = ("sales_train_evaluation.csv", "sales_train_validation.csv")

ID_COLUMNS = ("id", "item_id", "dept_id", "cat_id", "store_id", "state_id")
GROUP_COLUMNS = ("store_id", "dept_id", "cat_id", "state_id")
CALENDAR_COLUMNS = ("date", "d", "wday")
DAY_COLUMN = re.compile(r"^d_\d+$")

VALIDATION_START = "2016-04-25"
VALIDATION_END = "2016-05-22"


def _sales_path(directory):
    for name in SALES_FILES:
        path = os.path.join(directory, name)
        if os.path.isfile(path):
            return path
    raise MissingFile("none of " + ", ".join(SALES_FILES) + " found in " + str(directory))


def _read_calendar(directory):
    path = os.path.join(directory, CALENDAR_FILE)
    if not os.path.isfile(path):
        raise MissingFile(CALENDAR_FILE + " not found in " + str(directory))
    calendar = pd.read_csv(path)
    missing = [c for c in CALENDAR_COLUMNS if c not in calendar.columns]
    if missing:
        raise SchemaMismatch(CALENDAR_FILE + " does not match the M5 layout", missing=missing)
    calendar["date"] = pd.to_datetime(calendar["date"])
    return calendar


def load_m5(directory, start=None, end=None, departments=None):
    """
    Daily sales of every series between start and end (inclusive dates, default: all
    days of the sales file), labelled with store, department, category and state.
    departments restricts the panel to the given dept_id values, e.g. ["FOODS_3"].
    """
    calendar = _read_calendar(directory)
    sales_path = _sales_path(directory)
    header = pd.read_csv(sales_path, nrows=0).columns
    missing = [c for c in ID_COLUMNS if c not in header]
    day_columns = [c for c in header if DAY_COLUMN.match(c)]
    unexpected = [c for c in header if c not in ID_COLUMNS and not DAY_COLUMN.match(c)]
    unexpected += [c for c in day_columns if c not in set(calendar["d"])]
    if missing or unexpected or not day_columns:
        raise SchemaMismatch(os.path.basename(sales_path) + " does not match the M5 layout",
                             missing=missing + ([] if day_columns else ["d_1 ..."]), unexpected=unexpected)

    days = calendar[calendar["d"].isin(day_columns)]
    if start is not None:
        days = days[days["date"] >= pd.Timestamp(start)]
    if end is not None:
        days = days[days["date"] <= pd.Timestamp(end)]
    if days.empty:
        raise SchemaMismatch("no days of " + os.path.basename(sales_path) + " fall into "
                             + str(start) + " .. " + str(end))
    selected = list(days["d"])

    dtypes = {c: "category" for c in ID_COLUMNS[1:]}
    dtypes.update({c: np.int32 for c in selected})
    sales = pd.read_csv(sales_path, usecols=list(ID_COLUMNS) + selected, dtype=dtypes)
    if departments is not None:
        sales = sales[sales["dept_id"].isin(list(departments))]
    logger.info("loaded %d series x %d days from %s", len(sales), len(selected), sales_path)

    return SeriesPanel(sales["id"].to_numpy(), sales[selected].to_numpy(),
                       {c: sales[c].astype(str).to_numpy() for c in GROUP_COLUMNS},
                       (days["wday"].to_numpy() - 1) % 7, days["date"].dt.strftime("%Y-%m-%d").to_numpy())


def validation_start_with_history(history_days):
    """First date to load so that history_days precede the validation period"""
    start = pd.Timestamp(VALIDATION_START) - pd.Timedelta(days=history_days)
    return start.strftime("%Y-%m-%d")

#!/usr/bin/env python3
"""Regenerates data/demo: four tasks plus the offline replay fixture.

The replay scripts a completion stream per task and the output each cleaned
completion would produce, so `tabsynth eval --transport mock` runs without a
model or a sandbox runner.
"""
import datetime as dt
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "demo"


def columns(*pairs):
    return {"columns": [[name, list(cells)] for name, cells in pairs]}


def ok(*pairs):
    return {"status": "ok", "columns": [[name, list(cells)] for name, cells in pairs]}


# ---------------------------------------------------------------- usernames

NAMES = [
    "John Smith", "Jake L Woodhall", "Jo Anna Emily Gray", "Ash Kelsey-Poe",
    "Mary Jones", "Peter Parker", "Anna K Lee", "Bob Stone", "Li Wei Chen Ng",
    "Tom Reed", "Cara Ann-Marie", "Sam T Fox",
]


def username(name):
    parts = name.split()
    return (parts[0][0] + parts[-1]).lower()


def username_wrong(name):
    parts = name.split()
    return (parts[0][0] + parts[1]).lower()


def usernames_task():
    task = {
        "id": "dep-usernames",
        "query": "Create a new column with user names made of the first initial and the last name, in lowercase",
        "class": "dep",
        "input": columns(("Name", NAMES)),
        "expected": columns(("username", [username(n) for n in NAMES])),
        "reference_solution": "df['username'] = df['Name'].str.split().apply(lambda p: (p[0][0] + p[-1]).lower())",
        "metadata": {"source": "hand-written"},
    }
    stream, outputs = [], {}
    good = [username(n) for n in NAMES]
    bad = [username_wrong(n) for n in NAMES]
    for i in range(10):
        code = f"df['username'] = df['Name'].str.split().apply(lambda p{i}: (p{i}[0][0] + p{i}[-1]).lower())"
        stream.append(code if i != 3 else code + "\n\n# Split on spaces and keep the last part.")
        outputs[code] = ok(("Name", NAMES), ("username", good))
        wrong = f"users{i} = df['Name'].apply(lambda s: (s.split()[0][0] + s.split()[1]).lower())"
        stream.append(wrong)
        outputs[wrong] = ok(("users%d" % i, bad))
        if i == 1:
            stream.append({"error": "content_filter"})
        if i == 2:
            stream.append("import re")
        if i == 4:
            broken = "df['username'] = df['Nme'].str.lower()"
            stream.append(broken)
            outputs[broken] = {"status": "runtime-error", "error": "KeyError: 'Nme'"}
        if i == 5:
            stream.append(code)  # duplicate of an accepted completion
        if i == 6:
            short = "print(df['Name'].head(3))"
            stream.append(short)
            outputs[short] = ok(("Name", NAMES[:3]))
    return task, stream, outputs


# ---------------------------------------------------------------- timestamps

STAMPS = [
    ("2/22/2015 1:06:20 PM", "2/23/2015 3:08:20 PM"),
    ("1/1/2020 12:00:00 AM", "1/1/2020 8:30:15 AM"),
    ("3/14/2019 9:15:00 AM", "3/14/2019 5:45:30 PM"),
    ("7/4/2021 11:59:59 PM", "7/5/2021 12:00:01 AM"),
    ("12/31/2018 6:00:00 PM", "1/2/2019 6:00:00 AM"),
    ("5/5/2022 10:10:10 AM", "5/5/2022 10:10:11 AM"),
    ("8/1/2017 2:30:00 PM", "8/3/2017 4:45:00 PM"),
    ("10/10/2010 10:00:00 AM", "10/10/2010 1:05:09 PM"),
    ("11/30/2016 11:00:00 PM", "12/1/2016 1:00:00 AM"),
    ("6/15/2023 8:00:00 AM", "6/15/2023 8:00:00 AM"),
]
FMT = "%m/%d/%Y %I:%M:%S %p"


def hms(start, end, wrap_days=False):
    secs = int((dt.datetime.strptime(end, FMT) - dt.datetime.strptime(start, FMT)).total_seconds())
    if wrap_days:
        secs %= 86400
    return "%02d:%02d:%02d" % (secs // 3600, secs % 3600 // 60, secs % 60)


def timestamps_task():
    starts = [s for s, _ in STAMPS]
    ends = [e for _, e in STAMPS]
    good = [hms(s, e) for s, e in STAMPS]
    bad = [hms(s, e, wrap_days=True) for s, e in STAMPS]
    task = {
        "id": "ind-timestamps",
        "query": "Create a new column with the difference in hours, minutes, and seconds between the two timestamps in the format HH:MM:SS",
        "class": "ind",
        "input": columns(("Start", starts), ("End", ends)),
        "expected": columns(("Duration", good)),
        "metadata": {"source": "hand-written"},
    }
    stream, outputs = [], {}
    for i in range(20):
        if i % 4 == 3:
            code = (f"d{i} = (pd.to_datetime(df['End']) - pd.to_datetime(df['Start']))"
                    f".apply(lambda t: str(t).split(' ')[-1])")
            outputs[code] = ok(("d%d" % i, bad))
        else:
            code = (f"secs = (pd.to_datetime(df['End']) - pd.to_datetime(df['Start'])).dt.total_seconds().astype(int)\n"
                    f"df['Duration'] = secs.apply(lambda x: '%02d:%02d:%02d' % (x // 3600, x % 3600 // 60, x % 60))")
            if i > 0:
                code = code.replace("secs", f"secs{i}")
            outputs[code] = ok(("Start", starts), ("End", ends), ("Duration", good))
        raw = code.replace("'", "&#39;") if i == 1 else code
        stream.append(raw)
    return task, stream, outputs


# ---------------------------------------------------------------- holidays

US_HOLIDAYS = [
    dt.date(2022, 1, 17), dt.date(2022, 2, 21), dt.date(2022, 5, 30), dt.date(2022, 6, 20),
    dt.date(2022, 7, 4), dt.date(2022, 9, 5), dt.date(2022, 10, 10), dt.date(2022, 11, 11),
    dt.date(2022, 11, 24), dt.date(2022, 12, 26),
    dt.date(2023, 1, 2), dt.date(2023, 1, 16), dt.date(2023, 2, 20), dt.date(2023, 5, 29),
    dt.date(2023, 6, 19), dt.date(2023, 7, 4), dt.date(2023, 9, 4), dt.date(2023, 10, 9),
    dt.date(2023, 11, 10), dt.date(2023, 11, 23), dt.date(2023, 12, 25),
]
SPANS = [
    ("2022-01-01", "2022-01-31"), ("2022-02-01", "2022-06-30"), ("2022-07-01", "2022-07-31"),
    ("2022-08-15", "2022-09-15"), ("2022-10-01", "2022-12-31"), ("2023-01-01", "2023-01-01"),
    ("2023-01-03", "2023-01-15"), ("2023-03-01", "2023-05-28"), ("2023-06-01", "2023-09-30"),
    ("2023-11-01", "2023-12-31"), ("2022-12-20", "2023-01-20"),
]


def holiday_count(a, b, inclusive_end=True):
    lo, hi = dt.date.fromisoformat(a), dt.date.fromisoformat(b)
    return sum(1 for h in US_HOLIDAYS if lo <= h and (h <= hi if inclusive_end else h < hi))


def weekend_days(a, b):
    lo, hi = dt.date.fromisoformat(a), dt.date.fromisoformat(b)
    n = 0
    while lo <= hi:
        n += lo.weekday() >= 5
        lo += dt.timedelta(days=1)
    return n


def holidays_task():
    starts = [a for a, _ in SPANS]
    ends = [b for _, b in SPANS]
    good = [str(holiday_count(a, b)) for a, b in SPANS]
    task = {
        "id": "ext-holidays",
        "query": "Create a new column that counts how many US holidays are between the dates in Start Date and End Date",
        "class": "ext",
        "input": columns(("Start Date", starts), ("End Date", ends)),
        "expected": columns(("Holidays", good)),
        "metadata": {"source": "hand-written", "calendar": "US federal, observed"},
    }
    stream, outputs = [], {}
    for i in range(20):
        if i in (6, 13):
            code = (f"from pandas.tseries.holiday import USFederalHolidayCalendar as Cal{i}\n"
                    f"hol = Cal{i}().holidays('2022-01-01', '2023-12-31')\n"
                    f"df['Holidays'] = [((hol >= s) & (hol <= e)).sum() for s, e in zip(df['Start Date'], df['End Date'])]")
            outputs[code] = ok(("Start Date", starts), ("End Date", ends), ("Holidays", good))
        elif i % 2:
            code = f"df['Holidays'] = (pd.to_datetime(df['End Date']) - pd.to_datetime(df['Start Date'])).dt.days // {30 + i}"
            vals = [str((dt.date.fromisoformat(b) - dt.date.fromisoformat(a)).days // (30 + i)) for a, b in SPANS]
            outputs[code] = ok(("Start Date", starts), ("End Date", ends), ("Holidays", vals))
        else:
            code = (f"weekends{i} = [sum(d.weekday() >= 5 for d in pd.date_range(s, e)) "
                    f"for s, e in zip(df['Start Date'], df['End Date'])]")
            outputs[code] = ok(("weekends%d" % i, [str(weekend_days(a, b)) for a, b in SPANS]))
        stream.append(code)
    return task, stream, outputs


# ---------------------------------------------------------------- phone digits

PHONES = [
    "(555) 123-4567", "555.987.6543", "555-222-3333", "+1 555 444 5555", "5556667777",
    "(555)888-9999", "555 000 1111", "555-1234", "1-555-321-0000", "(555) 765 4321",
]


def phones_task():
    digits = ["".join(c for c in p if c.isdigit()) for p in PHONES]
    task = {
        "id": "ind-phone-digits",
        "query": "Create a new column with only the digits of the phone number",
        "class": "ind",
        "input": columns(("Phone", PHONES)),
        "expected": columns(("Digits", digits)),
        "metadata": {"source": "hand-written"},
    }
    stream, outputs = [], {}
    variants = [
        "df['Digits'] = df['Phone'].str.replace(r'\\D', '', regex=True)",
        "df['Digits'] = df['Phone'].str.replace('[^0-9]', '', regex=True)",
        "df['Digits'] = df['Phone'].apply(lambda p: ''.join(c for c in p if c.isdigit()))",
    ]
    for code in variants:
        stream.append(code)
        outputs[code] = ok(("Phone", PHONES), ("Digits", digits))
    wrong = "df['Digits'] = df['Phone'].str.replace('-', '')"
    stream.append(wrong)
    outputs[wrong] = ok(("Phone", PHONES), ("Digits", [p.replace("-", "") for p in PHONES]))
    slow = "df['Digits'] = df['Phone'].apply(lambda p: __import__('time').sleep(60))"
    stream.append(slow)
    outputs[slow] = {"status": "timeout", "error": "runner exceeded 5000 ms"}
    # The stream ends here, well short of the 20 valid completions asked for.
    return task, stream, outputs


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    replay = {"tasks": {}, "outputs": {}}
    for build in (usernames_task, timestamps_task, holidays_task, phones_task):
        task, stream, outputs = build()
        (OUT / f"{task['id']}.json").write_text(json.dumps(task, indent=2, ensure_ascii=False) + "\n")
        replay["tasks"][task["id"]] = {"stream": stream}
        for key, value in outputs.items():
            assert key not in replay["outputs"], key
            replay["outputs"][key] = value
    (OUT / "_replay.json").write_text(json.dumps(replay, indent=2, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()

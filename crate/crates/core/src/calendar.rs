//! Trading-day and 15-minute interval grid, holidays, and calendar indicator
//! features.
//!
//! A session is split into fixed 15-minute slots starting at the session
//! open; slot `k` covers `[open + 15k, open + 15(k+1))` and a bar timestamp
//! names the start of its slot. "Morning" is the first half of the slot range
//! (`slot < slots_per_day / 2`), "afternoon" the rest.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, NaiveTime, Timelike, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of one interval in minutes. Fixed across the crate.
pub const INTERVAL_MINUTES: u32 = 15;

const MONTHS: usize = 12;
const DAYS_OF_MONTH: usize = 31;
const WEEKDAYS: usize = 5;
const MINUTE_SEGMENTS: usize = 4;
const INDICATORS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingCalendar {
    session_open: NaiveTime,
    session_close: NaiveTime,
    holidays: BTreeSet<NaiveDate>,
    /// Indexed by days from Monday.
    weekend_days: [bool; 7],
}

impl TradingCalendar {
    /// Calendar with the given session bounds, Saturday/Sunday weekends and
    /// no holidays.
    pub fn new(session_open: NaiveTime, session_close: NaiveTime) -> Result<Self> {
        if session_close <= session_open {
            return Err(Error::InvalidCalendar(format!(
                "session close {session_close} is not after open {session_open}"
            )));
        }
        if session_open.second() != 0 || session_open.nanosecond() != 0 {
            return Err(Error::InvalidCalendar(
                "session open must fall on a whole minute".into(),
            ));
        }
        if !session_open.minute().is_multiple_of(INTERVAL_MINUTES) {
            return Err(Error::InvalidCalendar(format!(
                "session open {session_open} is not on a {INTERVAL_MINUTES}-minute boundary"
            )));
        }
        let minutes = (session_close - session_open).num_seconds();
        if minutes % (60 * INTERVAL_MINUTES as i64) != 0 {
            return Err(Error::InvalidCalendar(format!(
                "session length of {} minutes is not a multiple of {INTERVAL_MINUTES}",
                minutes as f64 / 60.0
            )));
        }
        Ok(Self {
            session_open,
            session_close,
            holidays: BTreeSet::new(),
            weekend_days: [false, false, false, false, false, true, true],
        })
    }

    /// Regular NYSE hours, 9:30 to 16:00 (26 slots).
    pub fn nyse() -> Self {
        Self::new(
            NaiveTime::from_hms_opt(9, 30, 0).unwrap(),
            NaiveTime::from_hms_opt(16, 0, 0).unwrap(),
        )
        .expect("static session bounds are valid")
    }

    /// Replaces the holiday set. Dates falling on weekend days are dropped.
    pub fn with_holidays(mut self, holidays: impl IntoIterator<Item = NaiveDate>) -> Self {
        self.holidays = holidays.into_iter().collect();
        self.normalize_holidays();
        self
    }

    pub fn with_weekend_days(mut self, days: impl IntoIterator<Item = Weekday>) -> Result<Self> {
        let mut flags = [false; 7];
        for d in days {
            flags[d.num_days_from_monday() as usize] = true;
        }
        if flags[..5].iter().all(|w| *w) {
            return Err(Error::InvalidCalendar(
                "weekend days leave no weekday to trade".into(),
            ));
        }
        self.weekend_days = flags;
        self.normalize_holidays();
        Ok(self)
    }

    fn normalize_holidays(&mut self) {
        let weekend = self.weekend_days;
        self.holidays
            .retain(|d| !weekend[d.weekday().num_days_from_monday() as usize]);
    }

    pub fn session_open(&self) -> NaiveTime {
        self.session_open
    }

    pub fn session_close(&self) -> NaiveTime {
        self.session_close
    }

    pub fn holidays(&self) -> &BTreeSet<NaiveDate> {
        &self.holidays
    }

    pub fn weekend_days(&self) -> Vec<Weekday> {
        (0..7u8)
            .filter(|i| self.weekend_days[*i as usize])
            .map(|i| Weekday::try_from(i).expect("index below 7"))
            .collect()
    }

    pub fn session_minutes(&self) -> u32 {
        ((self.session_close - self.session_open).num_minutes()) as u32
    }

    pub fn slots_per_day(&self) -> u32 {
        self.session_minutes() / INTERVAL_MINUTES
    }

    /// Number of distinct clock hours in which some slot starts.
    pub fn hour_width(&self) -> usize {
        (self.last_slot_hour() - self.session_open.hour() + 1) as usize
    }

    fn last_slot_hour(&self) -> u32 {
        self.slot_start(self.slots_per_day() - 1).hour()
    }

    /// Clock time at which `slot` begins.
    pub fn slot_start(&self, slot: u32) -> NaiveTime {
        self.session_open + Duration::minutes((slot * INTERVAL_MINUTES) as i64)
    }

    pub fn is_weekend(&self, day: NaiveDate) -> bool {
        self.weekend_days[day.weekday().num_days_from_monday() as usize]
    }

    pub fn is_trading_day(&self, day: NaiveDate) -> bool {
        !self.is_weekend(day) && !self.holidays.contains(&day)
    }

    /// Whether `slot` lies in the first half of the session.
    pub fn is_morning(&self, slot: u32) -> bool {
        slot < self.slots_per_day() / 2
    }

    /// Trading days in `[start, end]`, ascending. Empty when `start > end`.
    pub fn trading_days(&self, start: NaiveDate, end: NaiveDate) -> Vec<NaiveDate> {
        start
            .iter_days()
            .take_while(|d| *d <= end)
            .filter(|d| self.is_trading_day(*d))
            .collect()
    }

    pub fn next_trading_day(&self, day: NaiveDate) -> NaiveDate {
        let mut d = day.succ_opt().expect("date in range");
        while !self.is_trading_day(d) {
            d = d.succ_opt().expect("date in range");
        }
        d
    }

    pub fn previous_trading_day(&self, day: NaiveDate) -> NaiveDate {
        let mut d = day.pred_opt().expect("date in range");
        while !self.is_trading_day(d) {
            d = d.pred_opt().expect("date in range");
        }
        d
    }

    fn next_weekday(&self, day: NaiveDate) -> NaiveDate {
        let mut d = day.succ_opt().expect("date in range");
        while self.is_weekend(d) {
            d = d.succ_opt().expect("date in range");
        }
        d
    }

    fn previous_weekday(&self, day: NaiveDate) -> NaiveDate {
        let mut d = day.pred_opt().expect("date in range");
        while self.is_weekend(d) {
            d = d.pred_opt().expect("date in range");
        }
        d
    }

    /// All interval stamps of one trading day, in slot order.
    pub fn interval_grid(&self, day: NaiveDate) -> Result<Vec<IntervalStamp>> {
        if !self.is_trading_day(day) {
            return Err(Error::NonTradingDay(day));
        }
        Ok((0..self.slots_per_day())
            .map(|slot| IntervalStamp::new(day, slot))
            .collect())
    }

    /// Grid over every trading day in `[start, end]`.
    pub fn grid_between(&self, start: NaiveDate, end: NaiveDate) -> Vec<IntervalStamp> {
        let slots = self.slots_per_day();
        self.trading_days(start, end)
            .into_iter()
            .flat_map(|d| (0..slots).map(move |s| IntervalStamp::new(d, s)))
            .collect()
    }

    /// Maps a wall-clock timestamp onto its interval stamp. The timestamp must
    /// be exactly the start of a slot on a trading day.
    pub fn stamp_at(&self, at: NaiveDateTime) -> Result<IntervalStamp> {
        let day = at.date();
        if !self.is_trading_day(day) {
            return Err(Error::NonTradingDay(day));
        }
        let time = at.time();
        if time < self.session_open || time >= self.session_close {
            return Err(Error::InvalidSeries(format!(
                "{at} falls outside the session {}-{}",
                self.session_open, self.session_close
            )));
        }
        let offset = (time - self.session_open).num_seconds();
        if offset % (60 * INTERVAL_MINUTES as i64) != 0 {
            return Err(Error::InvalidSeries(format!(
                "{at} is not on a {INTERVAL_MINUTES}-minute slot boundary"
            )));
        }
        Ok(IntervalStamp::new(
            day,
            (offset / (60 * INTERVAL_MINUTES as i64)) as u32,
        ))
    }

    pub fn stamp_datetime(&self, stamp: IntervalStamp) -> NaiveDateTime {
        stamp.date.and_time(self.slot_start(stamp.slot))
    }

    pub fn validate_stamp(&self, stamp: IntervalStamp) -> Result<()> {
        if !self.is_trading_day(stamp.date) {
            return Err(Error::NonTradingDay(stamp.date));
        }
        if stamp.slot >= self.slots_per_day() {
            return Err(Error::InvalidSeries(format!(
                "slot {} out of range for a {}-slot session",
                stamp.slot,
                self.slots_per_day()
            )));
        }
        Ok(())
    }

    /// Indicator features for one interval.
    pub fn calendar_features(&self, stamp: IntervalStamp) -> Result<CalendarFeatures> {
        self.validate_stamp(stamp)?;
        let date = stamp.date;
        let start = self.slot_start(stamp.slot);
        let weekday = date.weekday();
        let morning = self.is_morning(stamp.slot);

        let preholiday = self.next_trading_day(date) != self.next_weekday(date);
        let postholiday = self.previous_trading_day(date) != self.previous_weekday(date);

        Ok(CalendarFeatures {
            month: date.month0() as usize,
            day_of_month: date.day0() as usize,
            // Weekend days never reach here, so Mon..Fri map to 0..4. A custom
            // weekend that leaves Saturday or Sunday tradable has no column.
            day_of_week: match weekday {
                Weekday::Sat | Weekday::Sun => None,
                d => Some(d.num_days_from_monday() as usize),
            },
            hour: (start.hour() - self.session_open.hour()) as usize,
            hour_width: self.hour_width(),
            minute_segment: (start.minute() / 15) as usize,
            monday_morning: weekday == Weekday::Mon && morning,
            friday_afternoon: weekday == Weekday::Fri && !morning,
            preholiday_afternoon: preholiday && !morning,
            postholiday_morning: postholiday && morning,
        })
    }

    /// Width of the indicator block produced by [`CalendarFeatures::write_into`].
    pub fn calendar_width(&self) -> usize {
        MONTHS + DAYS_OF_MONTH + WEEKDAYS + self.hour_width() + MINUTE_SEGMENTS + INDICATORS
    }

    /// Column names of the indicator block, in output order.
    pub fn calendar_column_names(&self) -> Vec<String> {
        const WEEKDAY_NAMES: [&str; WEEKDAYS] = ["mon", "tue", "wed", "thu", "fri"];
        let mut names = Vec::with_capacity(self.calendar_width());
        names.extend((1..=MONTHS).map(|m| format!("month_{m:02}")));
        names.extend((1..=DAYS_OF_MONTH).map(|d| format!("day_{d:02}")));
        names.extend(WEEKDAY_NAMES.iter().map(|d| format!("weekday_{d}")));
        let first_hour = self.session_open.hour();
        names.extend((0..self.hour_width()).map(|h| format!("hour_{:02}", first_hour as usize + h)));
        names.extend((0..MINUTE_SEGMENTS).map(|s| format!("minute_{:02}", s * 15)));
        names.extend(
            [
                "monday_morning",
                "friday_afternoon",
                "preholiday_afternoon",
                "postholiday_morning",
            ]
            .iter()
            .map(|s| s.to_string()),
        );
        names
    }
}

/// One 15-minute interval: a trading date and the slot index within its
/// session. Orders chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IntervalStamp {
    pub date: NaiveDate,
    pub slot: u32,
}

impl IntervalStamp {
    pub fn new(date: NaiveDate, slot: u32) -> Self {
        Self { date, slot }
    }
}

impl fmt::Display for IntervalStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.date, self.slot)
    }
}

/// Calendar indicators of one interval, stored as the hot index of each
/// one-hot group plus the four binary flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CalendarFeatures {
    pub month: usize,
    pub day_of_month: usize,
    pub day_of_week: Option<usize>,
    pub hour: usize,
    pub hour_width: usize,
    pub minute_segment: usize,
    pub monday_morning: bool,
    pub friday_afternoon: bool,
    pub preholiday_afternoon: bool,
    pub postholiday_morning: bool,
}

impl CalendarFeatures {
    pub fn width(&self) -> usize {
        MONTHS + DAYS_OF_MONTH + WEEKDAYS + self.hour_width + MINUTE_SEGMENTS + INDICATORS
    }

    /// Writes the 0/1 block into `out`, which must be exactly [`Self::width`]
    /// long and is overwritten entirely.
    pub fn write_into(&self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.width());
        out.fill(0.0);
        let mut base = 0;
        out[base + self.month] = 1.0;
        base += MONTHS;
        out[base + self.day_of_month] = 1.0;
        base += DAYS_OF_MONTH;
        if let Some(d) = self.day_of_week {
            out[base + d] = 1.0;
        }
        base += WEEKDAYS;
        out[base + self.hour] = 1.0;
        base += self.hour_width;
        out[base + self.minute_segment] = 1.0;
        base += MINUTE_SEGMENTS;
        for (k, flag) in [
            self.monday_morning,
            self.friday_afternoon,
            self.preholiday_afternoon,
            self.postholiday_morning,
        ]
        .into_iter()
        .enumerate()
        {
            out[base + k] = if flag { 1.0 } else { 0.0 };
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.width()];
        self.write_into(&mut v);
        v
    }
}

/// Parses a holiday list: one `YYYY-MM-DD` per line, `#` starts a comment,
/// blank lines ignored.
pub fn parse_holidays(text: &str, origin: &Path) -> Result<BTreeSet<NaiveDate>> {
    let mut out = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let date = NaiveDate::parse_from_str(line, "%Y-%m-%d").map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: idx + 1,
            message: format!("bad holiday date {line:?}: {e}"),
        })?;
        out.insert(date);
    }
    Ok(out)
}

pub fn load_holidays(path: impl AsRef<Path>) -> Result<BTreeSet<NaiveDate>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_holidays(&text, path)
}

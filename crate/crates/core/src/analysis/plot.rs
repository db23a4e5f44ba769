use serde::{Deserialize, Serialize};

/// Data-only figure description for external plotting tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub figure: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub z: Option<Vec<f64>>,
}

impl PlotData {
    pub fn new(figure: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        PlotData {
            figure: figure.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    pub fn with_series(mut self, label: impl Into<String>, points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let (x, y) = points.into_iter().unzip();
        self.series.push(Series {
            label: label.into(),
            x,
            y,
            z: None,
        });
        self
    }

    pub fn push(&mut self, series: Series) {
        self.series.push(series);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plot data serializes")
    }
}

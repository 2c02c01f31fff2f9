package org.example.config;

import java.util.Map;

/**
 * Reads typed values from a configuration.
 */
public class ConfigReader {

    public static final String TARGET = "pipeline.target";
    public static final String DEFAULT_TARGET = "local";
    public static final String RETRIES = "pipeline.retries";

    private final Configuration conf;

    public ConfigReader(Configuration conf) {
        this.conf = conf;
    }

    public String targetName() {
        String target = conf.getString(TARGET);
        return target.trim();
    }

    public int retries() {
        String value = conf.getString(RETRIES);
        if (value == null) {
            return 3;
        }
        return Integer.parseInt(value.trim());
    }

    public String describe(Map<String, String> extra) {
        StringBuilder sb = new StringBuilder();
        sb.append(targetName());
        for (Map.Entry<String, String> e : extra.entrySet()) {
            sb.append(',').append(e.getKey()).append('=').append(e.getValue());
        }
        return sb.toString();
    }
}

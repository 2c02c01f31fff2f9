package org.example.config;

import static org.junit.Assert.assertEquals;

import org.junit.Test;

public class ConfigReaderTest {

    @Test
    public void readsTarget() {
        Configuration conf = new Configuration();
        conf.setString(ConfigReader.TARGET, " remote ");
        assertEquals("remote", new ConfigReader(conf).targetName());
    }
}

package org.demo;

import java.util.List;

/**
 * A ledger account.
 */
public class Account {
    public static final int MAX_NAME = 64;
    private final String uid;
    private String name;
    private long balance, limit;

    public Account(String uid, String name) {
        this.uid = uid;
        this.name = name;
    }

    public String getName() {
        return name;
    }

    // rename the account
    public void setName(String name) {
        this.name = name;
    }

    public long total(List<Long> amounts) {
        long sum = 0;
        for (long a : amounts) {
            sum += a;
        }
        return sum;
    }

    public int countAbove(long[][] grid, long threshold) {
        int n = 0;
        for (int i = 0; i < grid.length; i++) {
            for (int j = 0; j < grid[i].length; j++) {
                if (grid[i][j] > threshold) n++;
            }
        }
        return n;
    }
}
